#include <string>
#include <vector>

#include "a11y/errors.hpp"
#include "a11y/workflows.hpp"

namespace a11y::workflows {

namespace {

constexpr std::string_view kLineOpen = "// <<a11y-fix-suggestion:";
constexpr std::string_view kLineClose = "// <<end>>";
constexpr std::string_view kBlockOpen = "<!-- <<a11y-fix-suggestion:";
constexpr std::string_view kBlockClose = "<<end>> -->";
constexpr std::string_view kJsxOpen = "{/* <<a11y-fix-suggestion:";
constexpr std::string_view kJsxClose = "<<end>> */}";

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (true) {
        const auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return lines;
}

// Content inside a block comment must not end it early or look like a marker.
std::string escape_block_comment(std::string_view text, CommentStyle style) {
    std::string out(text);
    const std::string_view closer = style == CommentStyle::HtmlBlock ? "--" : "*/";
    for (bool changed = true; changed;) {
        changed = false;
        for (std::string_view bad : {closer, std::string_view("<<"), std::string_view(">>")}) {
            for (auto p = out.find(bad); p != std::string::npos; p = out.find(bad, p + 2)) {
                out.insert(p + 1, " ");
                changed = true;
            }
        }
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && std::string_view(" \t\r\n").find(s.back()) != std::string_view::npos) s.remove_suffix(1);
    return s;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

enum class Marker { None, OpenLine, OpenBlock, OpenJsx, CloseLine, CloseBlock, CloseJsx };

Marker classify(std::string_view line) {
    const auto t = trim(line);
    const bool closes_id = t.size() >= 2 && t.substr(t.size() - 2) == ">>";
    if (starts_with(t, kLineOpen) && closes_id) return Marker::OpenLine;
    if (starts_with(t, kBlockOpen) && closes_id) return Marker::OpenBlock;
    if (starts_with(t, kJsxOpen) && closes_id) return Marker::OpenJsx;
    if (t == kLineClose) return Marker::CloseLine;
    if (t == kBlockClose) return Marker::CloseBlock;
    if (t == kJsxClose) return Marker::CloseJsx;
    return Marker::None;
}

CommentStyle flavor_style(markup::Flavor flavor) {
    return flavor == markup::Flavor::Html ? CommentStyle::HtmlBlock : CommentStyle::Line;
}

}  // namespace

CommentStyle comment_style_at(const markup::ElementTree& tree, markup::Flavor flavor, std::size_t offset) {
    if (flavor == markup::Flavor::Html) return CommentStyle::HtmlBlock;
    auto style = CommentStyle::Line;
    markup::walk(tree, [&](const markup::ElementNode& el, const auto&) {
        if (!el.close_tag_span || offset < el.open_tag_span.end || offset > el.close_tag_span->start) return;
        // Parents come first, so the innermost element decides.
        style = CommentStyle::JsxBlock;
        for (const auto& child : el.children) {
            const auto* expr = child.expression();
            if (expr && expr->span.start < offset && offset < expr->span.end) style = CommentStyle::Line;
        }
    });
    return style;
}

std::string render_annotation(const std::vector<llm::FixSuggestion>& suggestions, std::string_view id,
                              markup::Flavor flavor, std::string_view indent) {
    return render_annotation(suggestions, id, flavor_style(flavor), indent);
}

std::string render_annotation(const std::vector<llm::FixSuggestion>& suggestions, std::string_view id,
                              CommentStyle style, std::string_view indent) {
    const bool block = style != CommentStyle::Line;
    std::vector<std::string> body;
    // Each emitted line gets a prefix that no marker line can start with.
    auto emit = [&](std::string_view lead, std::string_view text) {
        bool first = true;
        for (auto line : split_lines(text)) {
            std::string out = first ? std::string(lead) : std::string(lead.size(), ' ');
            out += block ? escape_block_comment(line, style) : std::string(line);
            while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) out.pop_back();
            body.push_back(std::move(out));
            first = false;
        }
    };
    if (suggestions.empty()) body.push_back("No fix suggestions were returned.");
    for (std::size_t i = 0; i < suggestions.size(); ++i) {
        const auto& s = suggestions[i];
        emit(std::to_string(i + 1) + ". Error: ", s.error_description);
        emit("   Fix: ", s.fix_description);
        body.push_back("   Fixed code:");
        emit("     ", s.fixed_code);
    }

    const auto open = style == CommentStyle::Line ? kLineOpen : style == CommentStyle::HtmlBlock ? kBlockOpen : kJsxOpen;
    const auto close =
        style == CommentStyle::Line ? kLineClose : style == CommentStyle::HtmlBlock ? kBlockClose : kJsxClose;
    std::string out(indent);
    out += open;
    out += id;
    out += ">>\n";
    for (const auto& line : body) {
        out += indent;
        if (block) {
            out += line;
        } else {
            out += line.empty() ? "//" : "// " + line;
        }
        out += '\n';
    }
    out += indent;
    out += close;
    out += '\n';
    return out;
}

Insertion plan_annotation(std::string_view text, std::size_t anchor_start, std::size_t anchor_end,
                          const std::vector<llm::FixSuggestion>& suggestions, std::string_view id,
                          markup::Flavor flavor) {
    return plan_annotation(text, anchor_start, anchor_end, suggestions, id, flavor_style(flavor));
}

Insertion plan_annotation(std::string_view text, std::size_t anchor_start, std::size_t anchor_end,
                          const std::vector<llm::FixSuggestion>& suggestions, std::string_view id,
                          CommentStyle style) {
    if (anchor_start > anchor_end || anchor_end > text.size()) {
        throw RangeError("annotation anchor lies outside the document");
    }
    std::size_t indent_begin = 0;
    if (anchor_start > 0) {
        const auto prev_nl = text.rfind('\n', anchor_start - 1);
        if (prev_nl != std::string_view::npos) indent_begin = prev_nl + 1;
    }
    std::size_t indent_end = indent_begin;
    while (indent_end < text.size() && (text[indent_end] == ' ' || text[indent_end] == '\t')) ++indent_end;
    const auto indent = text.substr(indent_begin, indent_end - indent_begin);

    const auto last_byte = anchor_end > anchor_start ? anchor_end - 1 : anchor_end;
    const auto nl = text.find('\n', last_byte);
    auto block = render_annotation(suggestions, id, style, indent);
    if (nl == std::string_view::npos) {
        block.pop_back();
        return {text.size(), "\n" + block};
    }
    if (nl > 0 && text[nl - 1] == '\r') {
        std::string crlf;
        for (char c : block) {
            if (c == '\n') crlf += '\r';
            crlf += c;
        }
        block = std::move(crlf);
    }
    return {nl + 1, std::move(block)};
}

std::string apply_insertion(std::string_view text, const Insertion& insertion) {
    std::string out;
    out.reserve(text.size() + insertion.text.size());
    out += text.substr(0, insertion.offset);
    out += insertion.text;
    out += text.substr(insertion.offset);
    return out;
}

std::string strip_annotation(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    Marker open = Marker::None;
    std::size_t open_line = 0;
    std::size_t line_no = 0;
    for (std::size_t pos = 0; pos <= text.size();) {
        ++line_no;
        const auto nl = text.find('\n', pos);
        const auto end = nl == std::string_view::npos ? text.size() : nl + 1;
        const auto line = text.substr(pos, end - pos);
        const auto marker = classify(line);
        if (open == Marker::None) {
            if (marker == Marker::OpenLine || marker == Marker::OpenBlock || marker == Marker::OpenJsx) {
                open = marker;
                open_line = line_no;
            } else if (marker == Marker::CloseLine || marker == Marker::CloseBlock || marker == Marker::CloseJsx) {
                throw FormatError("annotation end marker without a start at line " + std::to_string(line_no));
            } else {
                out += line;
            }
        } else {
            if (marker == Marker::OpenLine || marker == Marker::OpenBlock || marker == Marker::OpenJsx) {
                throw FormatError("annotation starts at line " + std::to_string(line_no) +
                                  " inside the annotation opened at line " + std::to_string(open_line));
            }
            const bool closes = (open == Marker::OpenLine && marker == Marker::CloseLine) ||
                                (open == Marker::OpenBlock && marker == Marker::CloseBlock) ||
                                (open == Marker::OpenJsx && marker == Marker::CloseJsx);
            if (marker != Marker::None && !closes) {
                throw FormatError("mismatched annotation end marker at line " + std::to_string(line_no));
            }
            if (closes) {
                // A block that ends the file was joined with an extra newline.
                if (nl == std::string_view::npos && !out.empty() && out.back() == '\n') out.pop_back();
                open = Marker::None;
            }
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    if (open != Marker::None) {
        throw FormatError("annotation opened at line " + std::to_string(open_line) + " is never closed");
    }
    return out;
}

}  // namespace a11y::workflows
