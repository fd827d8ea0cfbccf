#include <algorithm>
#include <cctype>
#include <iterator>
#include <sstream>

#include "a11y/errors.hpp"
#include "a11y/rules.hpp"

namespace a11y::rules {

namespace {

using markup::Attribute;
using markup::ElementNode;
using markup::Flavor;
using markup::SourceDocument;
using markup::ValueKind;

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Element view with flavor-aware attribute lookup: JSX props are
// case-sensitive, HTML attributes are not.
class View {
public:
    View(const ElementNode& el, const SourceDocument& doc) : el_(el), doc_(doc) {
        tag_ = doc.flavor() == Flavor::Html ? lower(el.tag) : el.tag;
    }

    const ElementNode& element() const { return el_; }
    const std::string& tag() const { return tag_; }
    Flavor flavor() const { return doc_.flavor(); }

    const Attribute* attr(std::initializer_list<std::string_view> names) const {
        for (const auto& a : el_.attributes) {
            for (auto name : names) {
                if (doc_.flavor() == Flavor::Html ? iequals(a.name, name) : a.name == name) return &a;
            }
        }
        return nullptr;
    }

    bool has(std::initializer_list<std::string_view> names) const { return attr(names) != nullptr; }

    bool has_spread() const {
        return std::any_of(el_.attributes.begin(), el_.attributes.end(),
                           [](const Attribute& a) { return a.is_spread(); });
    }

    // Literal value when statically known. BareTrue reads as "true".
    std::optional<std::string> literal(std::initializer_list<std::string_view> names) const {
        const auto* a = attr(names);
        if (!a) return std::nullopt;
        switch (a->value.kind) {
            case ValueKind::StringLiteral: return a->value.literal;
            case ValueKind::BareTrue: return std::string("true");
            case ValueKind::Expression: {
                // {true}, {false}, {"x"} and {'x'} are static enough to read.
                std::string_view raw = a->value.raw;
                raw.remove_prefix(1);
                raw.remove_suffix(1);
                while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.front()))) raw.remove_prefix(1);
                while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.back()))) raw.remove_suffix(1);
                if (raw == "true" || raw == "false") return std::string(raw);
                if (raw.size() >= 2 && (raw.front() == '"' || raw.front() == '\'') && raw.back() == raw.front() &&
                    raw.find(raw.front(), 1) == raw.size() - 1) {
                    return std::string(raw.substr(1, raw.size() - 2));
                }
                return std::nullopt;
            }
        }
        return std::nullopt;
    }

    bool is_custom() const { return markup::is_custom_component(el_, doc_.flavor()); }

    bool aria_hidden() const {
        auto v = literal({"aria-hidden"});
        return v && lower(*v) == "true";
    }

    // button, a[href], input (not hidden), select, textarea
    bool natively_interactive() const {
        if (is_custom()) return false;
        if (tag_ == "button" || tag_ == "select" || tag_ == "textarea") return true;
        if (tag_ == "a" || tag_ == "area") return has({"href"});
        if (tag_ == "input") {
            auto type = literal({"type"});
            return !(type && lower(*type) == "hidden");
        }
        return false;
    }

    // First role token, or nullopt when absent. `unknown` is set when the
    // role is an expression the rules cannot read.
    std::optional<std::string> role(bool& unknown) const {
        unknown = false;
        const auto* a = attr({"role"});
        if (!a) return std::nullopt;
        auto v = literal({"role"});
        if (!v) {
            unknown = true;
            return std::nullopt;
        }
        std::istringstream in(*v);
        std::string first;
        in >> first;
        return lower(first);
    }

private:
    const ElementNode& el_;
    const SourceDocument& doc_;
    std::string tag_;
};

bool has_interaction_handler(const View& v) {
    return v.has({"onClick", "onMouseDown", "onMouseUp", "onKeyPress", "onKeyDown", "onKeyUp"});
}

bool is_heading(const std::string& tag) {
    return tag.size() == 2 && tag[0] == 'h' && tag[1] >= '1' && tag[1] <= '6';
}

bool has_accessible_child(const View& v, const SourceDocument& doc) {
    for (const auto& child : v.element().children) {
        if (const auto* t = child.text()) {
            if (!t->blank()) return true;
        } else if (const auto* e = child.expression()) {
            if (e->raw != "{undefined}") return true;
        } else if (const auto* el = child.element()) {
            View cv(*el, doc);
            const auto type = cv.literal({"type"});
            const bool hidden_input = cv.tag() == "input" && type && lower(*type) == "hidden";
            if (!cv.aria_hidden() && !hidden_input) return true;
        }
    }
    return v.has({"dangerouslySetInnerHTML", "children"});
}

std::string render(std::string_view summary, std::string_view tag, std::string_view attr, std::string_view value) {
    std::string out;
    for (std::size_t i = 0; i < summary.size();) {
        if (summary.compare(i, 5, "{tag}") == 0) {
            out += tag;
            i += 5;
        } else if (summary.compare(i, 6, "{attr}") == 0) {
            out += attr;
            i += 6;
        } else if (summary.compare(i, 7, "{value}") == 0) {
            out += value;
            i += 7;
        } else {
            out += summary[i++];
        }
    }
    return out;
}

const RuleDescriptor& descriptor(std::string_view id);

Diagnostic make(std::string_view rule_id, const markup::Span& span, std::string_view tag,
                std::string_view attr = {}, std::string_view value = {}) {
    const auto& d = descriptor(rule_id);
    return Diagnostic{std::string(d.id), render(d.summary, tag, attr, value), span,
                      std::string(d.wcag_criteria.front()), Severity::Error};
}

using Diags = std::vector<Diagnostic>;

Diags img_alt_required(const ElementNode& el, Ancestry, const SourceDocument& doc) {
    View v(el, doc);
    if (v.tag() != "img" || v.has_spread() || v.has({"alt"})) return {};
    return {make("img-alt-required", el.open_tag_span, el.tag)};
}

Diags anchor_has_content(const ElementNode& el, Ancestry, const SourceDocument& doc) {
    View v(el, doc);
    if (v.tag() != "a" || v.has_spread()) return {};
    if (has_accessible_child(v, doc) || v.has({"aria-label", "aria-labelledby", "title"})) return {};
    return {make("anchor-has-content", el.open_tag_span, el.tag)};
}

Diags click_events_have_key_events(const ElementNode& el, Ancestry, const SourceDocument& doc) {
    View v(el, doc);
    if (!v.has({"onClick"}) || v.has_spread() || v.natively_interactive()) return {};
    if (v.has({"onKeyDown", "onKeyUp", "onKeyPress"})) return {};
    return {make("click-events-have-key-events", el.open_tag_span, el.tag)};
}

Diags no_noninteractive_element_interactions(const ElementNode& el, Ancestry, const SourceDocument& doc) {
    View v(el, doc);
    if (v.has_spread() || v.natively_interactive()) return {};
    if (!has_interaction_handler(v)) return {};
    bool unknown = false;
    const auto role = v.role(unknown);
    if (unknown || (role && is_interactive_role(*role))) return {};
    return {make("no-noninteractive-element-interactions", el.open_tag_span, el.tag)};
}

Diags aria_role_valid(const ElementNode& el, Ancestry, const SourceDocument& doc) {
    View v(el, doc);
    const auto* a = v.attr({"role"});
    if (!a || a->value.kind == ValueKind::Expression) return {};
    const std::string value = a->value.literal.value_or("");
    std::istringstream in(value);
    std::string token;
    bool any = false;
    while (in >> token) {
        any = true;
        if (!is_valid_role(lower(token))) return {make("aria-role-valid", a->span, el.tag, a->name, token)};
    }
    if (!any) return {make("aria-role-valid", a->span, el.tag, a->name, value)};
    return {};
}

Diags aria_props_valid(const ElementNode& el, Ancestry, const SourceDocument& doc) {
    Diags out;
    for (const auto& a : el.attributes) {
        const auto name = doc.flavor() == Flavor::Html ? lower(a.name) : a.name;
        if (name.rfind("aria-", 0) == 0 && !is_aria_property(name)) {
            out.push_back(make("aria-props-valid", a.span, el.tag, a.name));
        }
    }
    return out;
}

Diags no_aria_hidden_with_label(const ElementNode& el, Ancestry, const SourceDocument& doc) {
    View v(el, doc);
    if (!v.aria_hidden() || !v.has({"aria-label", "aria-labelledby"})) return {};
    return {make("no-aria-hidden-with-label", el.open_tag_span, el.tag)};
}

Diags interactive_supports_focus(const ElementNode& el, Ancestry, const SourceDocument& doc) {
    View v(el, doc);
    if (v.has_spread() || v.natively_interactive() || v.has({"tabIndex", "tabindex"})) return {};
    if (!has_interaction_handler(v)) return {};
    bool unknown = false;
    const auto role = v.role(unknown);
    if (!role || !is_interactive_role(*role)) return {};
    return {make("interactive-supports-focus", el.open_tag_span, el.tag, "role", *role)};
}

bool nests_control(const ElementNode& el, const SourceDocument& doc) {
    for (const auto& child : el.children) {
        if (child.expression()) return true;  // unknown content may render a control
        const auto* c = child.element();
        if (!c) continue;
        View cv(*c, doc);
        if (cv.is_custom()) return true;
        const auto& t = cv.tag();
        if (t == "input" || t == "select" || t == "textarea" || t == "meter" || t == "output" ||
            t == "progress") {
            return true;
        }
        if (nests_control(*c, doc)) return true;
    }
    return false;
}

Diags label_has_associated_control(const ElementNode& el, Ancestry, const SourceDocument& doc) {
    View v(el, doc);
    if (v.tag() != "label" || v.has_spread() || v.has({"htmlFor", "for"})) return {};
    if (nests_control(el, doc)) return {};
    return {make("label-has-associated-control", el.open_tag_span, el.tag)};
}

Diags no_autofocus(const ElementNode& el, Ancestry, const SourceDocument& doc) {
    View v(el, doc);
    const auto* a = v.attr({"autoFocus", "autofocus"});
    if (!a) return {};
    return {make("no-autofocus", a->span, el.tag, a->name)};
}

Diags heading_has_content(const ElementNode& el, Ancestry, const SourceDocument& doc) {
    View v(el, doc);
    if (!is_heading(v.tag()) || v.has_spread() || has_accessible_child(v, doc)) return {};
    return {make("heading-has-content", el.open_tag_span, el.tag)};
}

Diags html_has_lang(const ElementNode& el, Ancestry, const SourceDocument& doc) {
    View v(el, doc);
    if (v.tag() != "html" || v.has_spread() || v.has({"lang"})) return {};
    return {make("html-has-lang", el.open_tag_span, el.tag)};
}

constexpr std::string_view kJsxA11yDocs = "https://github.com/jsx-eslint/eslint-plugin-jsx-a11y/blob/main/docs/rules/";

const std::vector<Rule>& rules() {
    static const std::vector<Rule> kRules = [] {
        auto doc = [](std::string_view name) { return name; };
        std::vector<Rule> r;
        r.push_back({{"img-alt-required",
                      "<{tag}> elements must have an alt attribute, either with meaningful text or an "
                      "empty string for decorative images",
                      {"1.1.1"}, Applicability::NativeOnly, doc("alt-text")},
                     img_alt_required});
        r.push_back({{"anchor-has-content",
                      "Anchors must have content and the content must be accessible by a screen reader",
                      {"2.4.4", "4.1.2"}, Applicability::NativeOnly, doc("anchor-has-content")},
                     anchor_has_content});
        r.push_back({{"click-events-have-key-events",
                      "Visible, non-interactive elements with click handlers must have at least one "
                      "keyboard listener",
                      {"2.1.1"}, Applicability::NativeOnly, doc("click-events-have-key-events")},
                     click_events_have_key_events});
        r.push_back({{"no-noninteractive-element-interactions",
                      "Non-interactive elements should not be assigned mouse or keyboard event listeners",
                      {"4.1.2", "2.1.1"}, Applicability::NativeOnly,
                      doc("no-noninteractive-element-interactions")},
                     no_noninteractive_element_interactions});
        r.push_back({{"aria-role-valid", "'{value}' is not a valid ARIA role",
                      {"4.1.2"}, Applicability::All, doc("aria-role")},
                     aria_role_valid});
        r.push_back({{"aria-props-valid", "{attr}: this attribute is an invalid ARIA attribute",
                      {"4.1.2"}, Applicability::All, doc("aria-props")},
                     aria_props_valid});
        r.push_back({{"no-aria-hidden-with-label",
                      "aria-label and aria-labelledby must not be used on an element with aria-hidden=\"true\"",
                      {"4.1.2", "1.3.1"}, Applicability::All, "https://www.w3.org/TR/wai-aria-1.2/#aria-hidden"},
                     no_aria_hidden_with_label});
        r.push_back({{"interactive-supports-focus",
                      "Elements with the '{value}' interactive role must be focusable",
                      {"2.1.1", "2.4.3"}, Applicability::NativeOnly, doc("interactive-supports-focus")},
                     interactive_supports_focus});
        r.push_back({{"label-has-associated-control", "A form label must be associated with a control",
                      {"3.3.2", "1.3.1"}, Applicability::NativeOnly, doc("label-has-associated-control")},
                     label_has_associated_control});
        r.push_back({{"no-autofocus",
                      "The {attr} attribute should not be used, as it can reduce usability and "
                      "accessibility for users",
                      {"3.2.1", "2.4.3"}, Applicability::All, doc("no-autofocus")},
                     no_autofocus});
        r.push_back({{"heading-has-content",
                      "Headings must have content and the content must be accessible by a screen reader",
                      {"2.4.6", "1.3.1"}, Applicability::NativeOnly, doc("heading-has-content")},
                     heading_has_content});
        r.push_back({{"html-has-lang", "<{tag}> elements must have the lang attribute",
                      {"3.1.1"}, Applicability::NativeOnly, doc("html-has-lang")},
                     html_has_lang});
        return r;
    }();
    return kRules;
}

// Full documentation URLs, built once next to the catalog.
const std::vector<std::string>& doc_urls() {
    static const std::vector<std::string> kUrls = [] {
        std::vector<std::string> urls;
        for (const auto& rule : rules()) {
            const auto u = rule.descriptor.doc_url;
            urls.push_back(u.rfind("https://", 0) == 0 ? std::string(u) : std::string(kJsxA11yDocs) + std::string(u) + ".md");
        }
        return urls;
    }();
    return kUrls;
}

const std::vector<Rule>& resolved_rules() {
    static const std::vector<Rule> kResolved = [] {
        auto r = rules();
        const auto& urls = doc_urls();
        for (std::size_t i = 0; i < r.size(); ++i) r[i].descriptor.doc_url = urls[i];
        return r;
    }();
    return kResolved;
}

const RuleDescriptor& descriptor(std::string_view id) {
    for (const auto& rule : resolved_rules()) {
        if (rule.descriptor.id == id) return rule.descriptor;
    }
    throw ConfigError("unknown rule id '" + std::string(id) + "'");
}

}  // namespace

std::span<const Rule> catalog() { return resolved_rules(); }

const RuleDescriptor* find_rule(std::string_view id) {
    for (const auto& rule : resolved_rules()) {
        if (rule.descriptor.id == id) return &rule.descriptor;
    }
    return nullptr;
}

std::set<std::string> all_rule_ids() {
    std::set<std::string> ids;
    for (const auto& rule : resolved_rules()) ids.emplace(rule.descriptor.id);
    return ids;
}

std::vector<Diagnostic> run_rules(const markup::ElementTree& tree, const SourceDocument& doc,
                                  const std::set<std::string>& enabled) {
    for (const auto& id : enabled) {
        if (!find_rule(id)) throw ConfigError("unknown rule id '" + id + "'");
    }
    std::vector<const Rule*> active;
    for (const auto& rule : resolved_rules()) {
        if (enabled.count(std::string(rule.descriptor.id))) active.push_back(&rule);
    }

    std::vector<Diagnostic> out;
    markup::walk(tree, [&](const ElementNode& el, const std::vector<const ElementNode*>& ancestry) {
        const bool custom = markup::is_custom_component(el, doc.flavor());
        for (const auto* rule : active) {
            if (custom && rule->descriptor.applicability == Applicability::NativeOnly) continue;
            auto found = rule->check(el, ancestry, doc);
            std::move(found.begin(), found.end(), std::back_inserter(out));
        }
    });
    std::stable_sort(out.begin(), out.end(), [](const Diagnostic& a, const Diagnostic& b) {
        if (a.span.start != b.span.start) return a.span.start < b.span.start;
        return a.rule_id < b.rule_id;
    });
    return out;
}

std::vector<Diagnostic> run_rules(const markup::ElementTree& tree, const SourceDocument& doc) {
    return run_rules(tree, doc, all_rule_ids());
}

}  // namespace a11y::rules
