#include <algorithm>
#include <iterator>
#include <cctype>

#include "a11y/rules.hpp"

namespace a11y::rules {

namespace {

using L = Level;
using V = WcagVersion;

constexpr WcagCriterion kCriteria[] = {
    {"1.1.1", "Non-text Content", L::A, V::V2_0},
    {"1.2.1", "Audio-only and Video-only (Prerecorded)", L::A, V::V2_0},
    {"1.2.2", "Captions (Prerecorded)", L::A, V::V2_0},
    {"1.2.3", "Audio Description or Media Alternative (Prerecorded)", L::A, V::V2_0},
    {"1.2.4", "Captions (Live)", L::AA, V::V2_0},
    {"1.2.5", "Audio Description (Prerecorded)", L::AA, V::V2_0},
    {"1.2.6", "Sign Language (Prerecorded)", L::AAA, V::V2_0},
    {"1.2.7", "Extended Audio Description (Prerecorded)", L::AAA, V::V2_0},
    {"1.2.8", "Media Alternative (Prerecorded)", L::AAA, V::V2_0},
    {"1.2.9", "Audio-only (Live)", L::AAA, V::V2_0},
    {"1.3.1", "Info and Relationships", L::A, V::V2_0},
    {"1.3.2", "Meaningful Sequence", L::A, V::V2_0},
    {"1.3.3", "Sensory Characteristics", L::A, V::V2_0},
    {"1.3.4", "Orientation", L::AA, V::V2_1},
    {"1.3.5", "Identify Input Purpose", L::AA, V::V2_1},
    {"1.3.6", "Identify Purpose", L::AAA, V::V2_1},
    {"1.4.1", "Use of Color", L::A, V::V2_0},
    {"1.4.2", "Audio Control", L::A, V::V2_0},
    {"1.4.3", "Contrast (Minimum)", L::AA, V::V2_0},
    {"1.4.4", "Resize Text", L::AA, V::V2_0},
    {"1.4.5", "Images of Text", L::AA, V::V2_0},
    {"1.4.6", "Contrast (Enhanced)", L::AAA, V::V2_0},
    {"1.4.7", "Low or No Background Audio", L::AAA, V::V2_0},
    {"1.4.8", "Visual Presentation", L::AAA, V::V2_0},
    {"1.4.9", "Images of Text (No Exception)", L::AAA, V::V2_0},
    {"1.4.10", "Reflow", L::AA, V::V2_1},
    {"1.4.11", "Non-text Contrast", L::AA, V::V2_1},
    {"1.4.12", "Text Spacing", L::AA, V::V2_1},
    {"1.4.13", "Content on Hover or Focus", L::AA, V::V2_1},
    {"2.1.1", "Keyboard", L::A, V::V2_0},
    {"2.1.2", "No Keyboard Trap", L::A, V::V2_0},
    {"2.1.3", "Keyboard (No Exception)", L::AAA, V::V2_0},
    {"2.1.4", "Character Key Shortcuts", L::A, V::V2_1},
    {"2.2.1", "Timing Adjustable", L::A, V::V2_0},
    {"2.2.2", "Pause, Stop, Hide", L::A, V::V2_0},
    {"2.2.3", "No Timing", L::AAA, V::V2_0},
    {"2.2.4", "Interruptions", L::AAA, V::V2_0},
    {"2.2.5", "Re-authenticating", L::AAA, V::V2_0},
    {"2.2.6", "Timeouts", L::AAA, V::V2_1},
    {"2.3.1", "Three Flashes or Below Threshold", L::A, V::V2_0},
    {"2.3.2", "Three Flashes", L::AAA, V::V2_0},
    {"2.3.3", "Animation from Interactions", L::AAA, V::V2_1},
    {"2.4.1", "Bypass Blocks", L::A, V::V2_0},
    {"2.4.2", "Page Titled", L::A, V::V2_0},
    {"2.4.3", "Focus Order", L::A, V::V2_0},
    {"2.4.4", "Link Purpose (In Context)", L::A, V::V2_0},
    {"2.4.5", "Multiple Ways", L::AA, V::V2_0},
    {"2.4.6", "Headings and Labels", L::AA, V::V2_0},
    {"2.4.7", "Focus Visible", L::AA, V::V2_0},
    {"2.4.8", "Location", L::AAA, V::V2_0},
    {"2.4.9", "Link Purpose (Link Only)", L::AAA, V::V2_0},
    {"2.4.10", "Section Headings", L::AAA, V::V2_0},
    {"2.4.11", "Focus Not Obscured (Minimum)", L::AA, V::V2_2},
    {"2.4.12", "Focus Not Obscured (Enhanced)", L::AAA, V::V2_2},
    {"2.4.13", "Focus Appearance", L::AAA, V::V2_2},
    {"2.5.1", "Pointer Gestures", L::A, V::V2_1},
    {"2.5.2", "Pointer Cancellation", L::A, V::V2_1},
    {"2.5.3", "Label in Name", L::A, V::V2_1},
    {"2.5.4", "Motion Actuation", L::A, V::V2_1},
    {"2.5.5", "Target Size (Enhanced)", L::AAA, V::V2_1},
    {"2.5.6", "Concurrent Input Mechanisms", L::AAA, V::V2_1},
    {"2.5.7", "Dragging Movements", L::AA, V::V2_2},
    {"2.5.8", "Target Size (Minimum)", L::AA, V::V2_2},
    {"3.1.1", "Language of Page", L::A, V::V2_0},
    {"3.1.2", "Language of Parts", L::AA, V::V2_0},
    {"3.1.3", "Unusual Words", L::AAA, V::V2_0},
    {"3.1.4", "Abbreviations", L::AAA, V::V2_0},
    {"3.1.5", "Reading Level", L::AAA, V::V2_0},
    {"3.1.6", "Pronunciation", L::AAA, V::V2_0},
    {"3.2.1", "On Focus", L::A, V::V2_0},
    {"3.2.2", "On Input", L::A, V::V2_0},
    {"3.2.3", "Consistent Navigation", L::AA, V::V2_0},
    {"3.2.4", "Consistent Identification", L::AA, V::V2_0},
    {"3.2.5", "Change on Request", L::AAA, V::V2_0},
    {"3.2.6", "Consistent Help", L::A, V::V2_2},
    {"3.3.1", "Error Identification", L::A, V::V2_0},
    {"3.3.2", "Labels or Instructions", L::A, V::V2_0},
    {"3.3.3", "Error Suggestion", L::AA, V::V2_0},
    {"3.3.4", "Error Prevention (Legal, Financial, Data)", L::AA, V::V2_0},
    {"3.3.5", "Help", L::AAA, V::V2_0},
    {"3.3.6", "Error Prevention (All)", L::AAA, V::V2_0},
    {"3.3.7", "Redundant Entry", L::A, V::V2_2},
    {"3.3.8", "Accessible Authentication (Minimum)", L::AA, V::V2_2},
    {"3.3.9", "Accessible Authentication (Enhanced)", L::AAA, V::V2_2},
    {"4.1.2", "Name, Role, Value", L::A, V::V2_0},
    {"4.1.3", "Status Messages", L::AA, V::V2_1},
};

// ARIA 1.2 concrete roles, plus the DPUB-ARIA and Graphics-ARIA modules.
constexpr std::string_view kRoles[] = {
    "alert", "alertdialog", "application", "article", "banner", "blockquote", "button",
    "caption", "cell", "checkbox", "code", "columnheader", "combobox", "complementary",
    "contentinfo", "definition", "deletion", "dialog", "directory", "document", "emphasis",
    "feed", "figure", "form", "generic", "grid", "gridcell", "group", "heading", "img",
    "insertion", "link", "list", "listbox", "listitem", "log", "main", "marquee", "math",
    "menu", "menubar", "menuitem", "menuitemcheckbox", "menuitemradio", "meter", "navigation",
    "none", "note", "option", "paragraph", "presentation", "progressbar", "radio", "radiogroup",
    "region", "row", "rowgroup", "rowheader", "scrollbar", "search", "searchbox", "separator",
    "slider", "spinbutton", "status", "strong", "subscript", "superscript", "switch", "tab",
    "table", "tablist", "tabpanel", "term", "textbox", "time", "timer", "toolbar", "tooltip",
    "tree", "treegrid", "treeitem",
    "doc-abstract", "doc-acknowledgments", "doc-afterword", "doc-appendix", "doc-backlink",
    "doc-biblioentry", "doc-bibliography", "doc-biblioref", "doc-chapter", "doc-colophon",
    "doc-conclusion", "doc-cover", "doc-credit", "doc-credits", "doc-dedication", "doc-endnote",
    "doc-endnotes", "doc-epigraph", "doc-epilogue", "doc-errata", "doc-example", "doc-footnote",
    "doc-foreword", "doc-glossary", "doc-glossref", "doc-index", "doc-introduction",
    "doc-noteref", "doc-notice", "doc-pagebreak", "doc-pagelist", "doc-part", "doc-preface",
    "doc-prologue", "doc-pullquote", "doc-qna", "doc-subtitle", "doc-tip", "doc-toc",
    "graphics-document", "graphics-object", "graphics-symbol"};

constexpr std::string_view kInteractiveRoles[] = {
    "button", "checkbox", "columnheader", "combobox", "gridcell", "link", "listbox",
    "menu", "menubar", "menuitem", "menuitemcheckbox", "menuitemradio", "option", "radio",
    "radiogroup", "rowheader", "scrollbar", "searchbox", "slider", "spinbutton", "switch",
    "tab", "tablist", "textbox", "toolbar", "tree", "treegrid", "treeitem"};

constexpr std::string_view kAriaProperties[] = {
    "aria-activedescendant", "aria-atomic", "aria-autocomplete", "aria-busy", "aria-checked",
    "aria-colcount", "aria-colindex", "aria-colspan", "aria-controls", "aria-current",
    "aria-describedby", "aria-details", "aria-disabled", "aria-dropeffect", "aria-errormessage",
    "aria-expanded", "aria-flowto", "aria-grabbed", "aria-haspopup", "aria-hidden",
    "aria-invalid", "aria-keyshortcuts", "aria-label", "aria-labelledby", "aria-level",
    "aria-live", "aria-modal", "aria-multiline", "aria-multiselectable", "aria-orientation",
    "aria-owns", "aria-placeholder", "aria-posinset", "aria-pressed", "aria-readonly",
    "aria-relevant", "aria-required", "aria-roledescription", "aria-rowcount", "aria-rowindex",
    "aria-rowspan", "aria-selected", "aria-setsize", "aria-sort", "aria-valuemax",
    "aria-valuemin", "aria-valuenow", "aria-valuetext", "aria-braillelabel",
    "aria-brailleroledescription"};

template <std::size_t N>
bool in(const std::string_view (&set)[N], std::string_view v) {
    return std::find(std::begin(set), std::end(set), v) != std::end(set);
}

}  // namespace

std::string_view to_string(Level level) {
    switch (level) {
        case Level::A: return "A";
        case Level::AA: return "AA";
        case Level::AAA: return "AAA";
    }
    return "A";
}

std::span<const WcagCriterion> wcag_criteria() { return kCriteria; }

const WcagCriterion* find_criterion(std::string_view id) {
    auto it = std::find_if(std::begin(kCriteria), std::end(kCriteria),
                           [&](const WcagCriterion& c) { return c.id == id; });
    return it == std::end(kCriteria) ? nullptr : &*it;
}

std::optional<std::string> normalize_criterion(std::string_view text) {
    auto digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (!digit(text[i]) || (i > 0 && (digit(text[i - 1]) || text[i - 1] == '.'))) continue;
        std::size_t j = i;
        int groups = 0;
        while (groups < 3) {
            const auto start = j;
            while (j < text.size() && digit(text[j])) ++j;
            if (j == start) break;
            ++groups;
            if (groups < 3) {
                if (j < text.size() && text[j] == '.') {
                    ++j;
                } else {
                    break;
                }
            }
        }
        if (groups == 3) return std::string(text.substr(i, j - i));
    }
    return std::nullopt;
}

bool is_valid_role(std::string_view role) { return in(kRoles, role); }
bool is_interactive_role(std::string_view role) { return in(kInteractiveRoles, role); }
bool is_aria_property(std::string_view name) { return in(kAriaProperties, name); }

}  // namespace a11y::rules
