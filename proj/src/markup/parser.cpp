#include <algorithm>
#include <iterator>
#include <cctype>
#include <string>
#include <string_view>

#include "a11y/markup.hpp"

namespace a11y::markup {

namespace {

// Guards the recursive descent against pathological nesting.
constexpr int kMaxDepth = 256;

constexpr std::string_view kVoidElements[] = {
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr"};

constexpr std::string_view kRawTextElements[] = {"script", "style", "textarea", "title"};

// Elements whose end tag may be omitted without a warning.
constexpr std::string_view kOptionalEndTag[] = {
    "html", "head", "body", "p", "li", "dt", "dd", "option", "optgroup",
    "tr", "td", "th", "thead", "tbody", "tfoot", "colgroup", "rt"};

constexpr std::string_view kClosesParagraph[] = {
    "address", "article", "aside", "blockquote", "details", "div", "dl",
    "fieldset", "figure", "footer", "form", "h1", "h2", "h3", "h4", "h5", "h6",
    "header", "hr", "main", "nav", "ol", "p", "pre", "section", "table", "ul"};

constexpr std::string_view kJsxKeywordsBeforeExpr[] = {
    "return", "yield", "default", "case", "await", "throw"};

template <std::size_t N>
bool contains(const std::string_view (&set)[N], std::string_view value) {
    return std::find(std::begin(set), std::end(set), value) != std::end(set);
}

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
           static_cast<unsigned char>(c) >= 0x80;
}

bool is_ident_char(char c) {
    return is_ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

bool is_jsx_name_char(char c) {
    return is_ident_char(c) || c == '-' || c == ':' || c == '.';
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

// Decodes the handful of character references attribute literals use in
// practice. Unknown references are kept verbatim.
std::string decode_entities(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size();) {
        if (raw[i] != '&') {
            out += raw[i++];
            continue;
        }
        const auto semi = raw.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 10) {
            out += raw[i++];
            continue;
        }
        const auto name = raw.substr(i + 1, semi - i - 1);
        bool decoded = true;
        if (name == "amp") out += '&';
        else if (name == "lt") out += '<';
        else if (name == "gt") out += '>';
        else if (name == "quot") out += '"';
        else if (name == "apos") out += '\'';
        else if (name == "nbsp") append_utf8(out, 0xA0);
        else if (name.size() > 1 && name[0] == '#') {
            std::uint32_t cp = 0;
            const bool hex = name[1] == 'x' || name[1] == 'X';
            const auto digits = name.substr(hex ? 2 : 1);
            if (digits.empty()) decoded = false;
            for (char c : digits) {
                const int v = hex ? (std::isxdigit(static_cast<unsigned char>(c))
                                         ? (std::isdigit(static_cast<unsigned char>(c)) ? c - '0' : (std::tolower(c) - 'a' + 10))
                                         : -1)
                                  : (std::isdigit(static_cast<unsigned char>(c)) ? c - '0' : -1);
                if (v < 0 || cp > 0x10FFFF) {
                    decoded = false;
                    break;
                }
                cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
            }
            if (decoded) append_utf8(out, cp);
        } else {
            decoded = false;
        }
        if (decoded) {
            i = semi + 1;
        } else {
            out += raw[i++];
        }
    }
    return out;
}

// True when `inner` holds nothing but whitespace and JS comments.
bool only_comments(std::string_view inner) {
    std::size_t i = 0;
    bool saw_comment = false;
    while (i < inner.size()) {
        if (is_space(inner[i])) {
            ++i;
        } else if (inner.compare(i, 2, "/*") == 0) {
            const auto end = inner.find("*/", i + 2);
            if (end == std::string_view::npos) return false;
            i = end + 2;
            saw_comment = true;
        } else if (inner.compare(i, 2, "//") == 0) {
            const auto end = inner.find('\n', i);
            i = end == std::string_view::npos ? inner.size() : end + 1;
            saw_comment = true;
        } else {
            return false;
        }
    }
    return saw_comment;
}

struct ChildrenEnd {
    std::size_t next;         // where the caller resumes scanning
    std::size_t element_end;  // end offset of the element being closed
};

class Parser {
public:
    explicit Parser(const SourceDocument& doc) : doc_(doc), s_(doc.text()), n_(s_.size()) {}

    ElementTree run() {
        if (doc_.markup_enabled()) {
            if (doc_.flavor() == Flavor::Html) {
                parse_html();
            } else {
                scan_js(0, false, 0);
            }
        }
        std::stable_sort(tree_.roots.begin(), tree_.roots.end(),
                         [](const ElementNode& a, const ElementNode& b) { return a.span.start < b.span.start; });
        std::stable_sort(tree_.comments.begin(), tree_.comments.end(),
                         [](const Span& a, const Span& b) { return a.start < b.start; });
        return std::move(tree_);
    }

private:
    Span span(std::size_t a, std::size_t b) const { return doc_.span(a, std::min(b, n_)); }

    void warn(std::size_t a, std::size_t b, std::string message) {
        tree_.warnings.push_back(ParseWarning{span(a, b), std::move(message)});
    }

    char at(std::size_t i) const { return i < n_ ? s_[i] : '\0'; }

    void add_roots(std::vector<Child>& found) {
        for (auto& c : found) {
            if (auto* el = std::get_if<ElementNode>(&c.node)) tree_.roots.push_back(std::move(*el));
        }
        found.clear();
    }

    // ---- JavaScript scanning -------------------------------------------

    std::size_t skip_string(std::size_t i) const {
        const char quote = s_[i++];
        while (i < n_) {
            const char c = s_[i];
            if (c == '\\') {
                i += 2;
                continue;
            }
            if (c == quote) return i + 1;
            if (c == '\n') return i;  // unterminated; resume on next line
            ++i;
        }
        return n_;
    }

    std::size_t skip_template(std::size_t i, int depth) {
        ++i;  // opening backtick
        while (i < n_) {
            const char c = s_[i];
            if (c == '\\') {
                i += 2;
            } else if (c == '`') {
                return i + 1;
            } else if (c == '$' && at(i + 1) == '{') {
                i = scan_js(i + 2, true, depth + 1);
                if (i < n_) ++i;
            } else {
                ++i;
            }
        }
        return n_;
    }

    std::size_t skip_regex(std::size_t i) const {
        ++i;
        bool in_class = false;
        while (i < n_) {
            const char c = s_[i];
            if (c == '\\') {
                i += 2;
                continue;
            }
            if (c == '\n') return i;
            if (in_class) {
                if (c == ']') in_class = false;
            } else if (c == '[') {
                in_class = true;
            } else if (c == '/') {
                ++i;
                while (i < n_ && is_ident_char(s_[i])) ++i;  // flags
                return i;
            }
            ++i;
        }
        return n_;
    }

    // Scans JavaScript from `i`. With `until_brace` it stops at the `}` that
    // balances an already consumed `{` and returns its offset; otherwise it
    // runs to the end of the text. Markup found in expression position is
    // parsed and registered as root elements.
    std::size_t scan_js(std::size_t i, bool until_brace, int depth) {
        if (depth > kMaxDepth) {
            warn(std::min(i, n_), std::min(i, n_), "nesting too deep; rest of input skipped");
            return n_;
        }
        int braces = 0;
        bool expr_position = true;
        while (i < n_) {
            const char c = s_[i];
            if (is_space(c)) {
                ++i;
            } else if (c == '/' && at(i + 1) == '/') {
                const auto end = s_.find('\n', i);
                i = end == std::string_view::npos ? n_ : end + 1;
            } else if (c == '/' && at(i + 1) == '*') {
                const auto end = s_.find("*/", i + 2);
                if (end == std::string_view::npos) {
                    warn(i, n_, "unterminated comment");
                    return n_;
                }
                i = end + 2;
            } else if (c == '"' || c == '\'') {
                i = skip_string(i);
                expr_position = false;
            } else if (c == '`') {
                i = skip_template(i, depth);
                expr_position = false;
            } else if (c == '{') {
                ++braces;
                ++i;
                expr_position = true;
            } else if (c == '}') {
                if (until_brace && braces == 0) return i;
                if (braces > 0) --braces;
                ++i;
                expr_position = false;
            } else if (c == '/' && expr_position) {
                i = skip_regex(i);
                expr_position = false;
            } else if (c == '<' && expr_position && (is_ident_start(at(i + 1)) || at(i + 1) == '>')) {
                std::vector<Child> found;
                std::vector<std::string> open;
                if (auto next = parse_jsx(i, found, open, depth + 1)) {
                    add_roots(found);
                    i = *next;
                    expr_position = false;
                } else {
                    ++i;
                    expr_position = true;
                }
            } else if (is_ident_start(c)) {
                const auto start = i;
                while (i < n_ && is_ident_char(s_[i])) ++i;
                expr_position = contains(kJsxKeywordsBeforeExpr, s_.substr(start, i - start));
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                while (i < n_ && (is_ident_char(s_[i]) || s_[i] == '.')) ++i;
                expr_position = false;
            } else if (c == ')' || c == ']') {
                ++i;
                expr_position = false;
            } else {
                ++i;
                expr_position = true;
            }
        }
        return n_;
    }

    // ---- JSX -------------------------------------------------------------

    std::size_t skip_tag_trivia(std::size_t i) const {
        while (i < n_) {
            if (is_space(s_[i])) {
                ++i;
            } else if (s_[i] == '/' && at(i + 1) == '*') {
                const auto end = s_.find("*/", i + 2);
                i = end == std::string_view::npos ? n_ : end + 2;
            } else if (s_[i] == '/' && at(i + 1) == '/') {
                const auto end = s_.find('\n', i);
                i = end == std::string_view::npos ? n_ : end + 1;
            } else {
                break;
            }
        }
        return i;
    }

    // Parses one JSX element or fragment starting at the `<` at `lt`. Parsed
    // nodes are appended to `out` (a fragment contributes its children).
    // Returns the offset just past the element, or nullopt when the text at
    // `lt` is not markup after all.
    std::optional<std::size_t> parse_jsx(std::size_t lt, std::vector<Child>& out,
                                         std::vector<std::string>& open, int depth) {
        if (depth > kMaxDepth) {
            warn(lt, lt + 1, "nesting too deep");
            return std::nullopt;
        }
        std::size_t i = lt + 1;
        if (at(i) == '>') {
            ElementNode fragment;
            open.emplace_back();
            const auto end = parse_jsx_children(i + 1, fragment, open, depth + 1);
            open.pop_back();
            for (auto& child : fragment.children) out.push_back(std::move(child));
            return end.next;
        }

        const auto name_start = i;
        while (i < n_ && is_jsx_name_char(s_[i])) ++i;
        if (i == name_start) return std::nullopt;

        ElementNode el;
        el.tag = std::string(s_.substr(name_start, i - name_start));

        while (true) {
            i = skip_tag_trivia(i);
            if (i >= n_) {
                warn(lt, n_, "unterminated opening tag <" + el.tag + ">");
                return std::nullopt;
            }
            const char c = s_[i];
            if (c == '/' && at(i + 1) == '>') {
                el.self_closing = true;
                i += 2;
                break;
            }
            if (c == '>') {
                ++i;
                break;
            }
            if (c == '{') {
                const auto close = scan_js(i + 1, true, depth + 1);
                if (close >= n_) {
                    warn(i, n_, "unterminated attribute expression");
                    return std::nullopt;
                }
                Attribute attr;
                auto inner = s_.substr(i + 1, close - i - 1);
                while (!inner.empty() && is_space(inner.front())) inner.remove_prefix(1);
                while (!inner.empty() && is_space(inner.back())) inner.remove_suffix(1);
                attr.name = inner.rfind("...", 0) == 0 ? std::string(inner) : "..." + std::string(inner);
                attr.value.kind = ValueKind::Expression;
                attr.value.raw = std::string(s_.substr(i, close + 1 - i));
                attr.span = span(i, close + 1);
                el.attributes.push_back(std::move(attr));
                i = close + 1;
                continue;
            }
            if (is_ident_start(c)) {
                const auto attr_start = i;
                while (i < n_ && (is_ident_char(s_[i]) || s_[i] == '-' || s_[i] == ':')) ++i;
                Attribute attr;
                attr.name = std::string(s_.substr(attr_start, i - attr_start));
                auto j = skip_tag_trivia(i);
                if (at(j) != '=') {
                    attr.value.kind = ValueKind::BareTrue;
                    attr.span = span(attr_start, i);
                    el.attributes.push_back(std::move(attr));
                    continue;
                }
                j = skip_tag_trivia(j + 1);
                const char v = at(j);
                std::size_t value_end = 0;
                if (v == '"' || v == '\'') {
                    const auto close = s_.find(v, j + 1);
                    if (close == std::string_view::npos) {
                        warn(j, n_, "unterminated attribute string");
                        return std::nullopt;
                    }
                    value_end = close + 1;
                    attr.value.kind = ValueKind::StringLiteral;
                    attr.value.literal = decode_entities(s_.substr(j + 1, close - j - 1));
                } else if (v == '{') {
                    const auto close = scan_js(j + 1, true, depth + 1);
                    if (close >= n_) {
                        warn(j, n_, "unterminated attribute expression");
                        return std::nullopt;
                    }
                    value_end = close + 1;
                    attr.value.kind = ValueKind::Expression;
                } else if (v == '<') {
                    std::vector<Child> nested;
                    std::vector<std::string> nested_open;
                    auto next = parse_jsx(j, nested, nested_open, depth + 1);
                    if (!next) return std::nullopt;
                    add_roots(nested);
                    value_end = *next;
                    attr.value.kind = ValueKind::Expression;
                } else {
                    auto k = j;
                    while (k < n_ && !is_space(s_[k]) && s_[k] != '>' &&
                           !(s_[k] == '/' && at(k + 1) == '>')) {
                        ++k;
                    }
                    warn(j, k, "unquoted attribute value");
                    value_end = k;
                    attr.value.kind = ValueKind::StringLiteral;
                    attr.value.literal = std::string(s_.substr(j, k - j));
                }
                attr.value.raw = std::string(s_.substr(j, value_end - j));
                attr.span = span(attr_start, value_end);
                el.attributes.push_back(std::move(attr));
                i = value_end;
                continue;
            }
            warn(i, i + 1, std::string("unexpected character '") + c + "' in <" + el.tag + ">");
            ++i;
        }

        el.open_tag_span = span(lt, i);
        std::size_t element_end = i;
        if (!el.self_closing) {
            open.push_back(el.tag);
            const auto end = parse_jsx_children(i, el, open, depth + 1);
            open.pop_back();
            i = end.next;
            element_end = end.element_end;
        }
        el.span = span(lt, element_end);
        out.push_back(Child{std::move(el)});
        return i;
    }

    ChildrenEnd parse_jsx_children(std::size_t i, ElementNode& el, std::vector<std::string>& open, int depth) {
        std::size_t text_start = i;
        auto flush_text = [&](std::size_t end) {
            if (end > text_start) {
                el.children.push_back(
                    Child{TextNode{std::string(s_.substr(text_start, end - text_start)), span(text_start, end)}});
            }
        };
        const std::string tag = open.back();

        while (i < n_) {
            const char c = s_[i];
            if (c == '<' && at(i + 1) == '/') {
                flush_text(i);
                auto j = skip_tag_trivia(i + 2);
                const auto name_start = j;
                while (j < n_ && is_jsx_name_char(s_[j])) ++j;
                const auto name = std::string(s_.substr(name_start, j - name_start));
                j = skip_tag_trivia(j);
                if (at(j) == '>') {
                    ++j;
                } else {
                    warn(i, j, "malformed closing tag");
                }
                if (name == tag) {
                    if (!tag.empty()) el.close_tag_span = span(i, j);
                    return {j, j};
                }
                if (std::find(open.begin(), open.end(), name) != open.end()) {
                    warn(el.children.empty() ? i : el.children.front().span().start, i,
                         "missing closing tag for <" + tag + ">");
                    return {i, i};
                }
                warn(i, j, "unexpected closing tag </" + name + ">");
                i = j;
                text_start = i;
                continue;
            }
            if (c == '<' && (is_ident_start(at(i + 1)) || at(i + 1) == '>')) {
                flush_text(i);
                if (auto next = parse_jsx(i, el.children, open, depth + 1)) {
                    i = *next;
                    text_start = i;
                } else {
                    text_start = i;
                    ++i;
                }
                continue;
            }
            if (c == '{') {
                flush_text(i);
                const auto close = scan_js(i + 1, true, depth + 1);
                if (close >= n_) {
                    warn(i, n_, "unterminated expression container");
                    i = n_;
                    text_start = n_;
                    break;
                }
                const auto inner = s_.substr(i + 1, close - i - 1);
                if (only_comments(inner)) {
                    tree_.comments.push_back(span(i, close + 1));
                } else {
                    el.children.push_back(
                        Child{ExpressionNode{std::string(s_.substr(i, close + 1 - i)), span(i, close + 1)}});
                }
                i = close + 1;
                text_start = i;
                continue;
            }
            ++i;
        }
        flush_text(i);
        if (!tag.empty()) {
            warn(el.open_tag_span.start, el.open_tag_span.end, "unclosed <" + tag + ">");
        } else {
            warn(n_, n_, "unclosed fragment");
        }
        return {n_, n_};
    }

    // ---- HTML ------------------------------------------------------------

    struct OpenElement {
        ElementNode el;
        std::string lower_tag;
    };

    static bool closes_implicitly(const std::string& open_tag, const std::string& new_tag) {
        if (open_tag == "p") return contains(kClosesParagraph, new_tag);
        if (open_tag == "li") return new_tag == "li";
        if (open_tag == "dt" || open_tag == "dd") return new_tag == "dt" || new_tag == "dd";
        if (open_tag == "option") return new_tag == "option" || new_tag == "optgroup";
        if (open_tag == "td" || open_tag == "th") return new_tag == "td" || new_tag == "th" || new_tag == "tr";
        if (open_tag == "tr") return new_tag == "tr";
        return false;
    }

    void parse_html() {
        std::vector<OpenElement> stack;
        std::size_t i = 0;
        std::size_t text_start = 0;

        auto append = [&](Child child) {
            if (stack.empty()) {
                if (auto* el = std::get_if<ElementNode>(&child.node)) tree_.roots.push_back(std::move(*el));
            } else {
                stack.back().el.children.push_back(std::move(child));
            }
        };
        auto flush_text = [&](std::size_t end) {
            if (end > text_start && !stack.empty()) {
                append(Child{TextNode{std::string(s_.substr(text_start, end - text_start)), span(text_start, end)}});
            }
        };
        auto close_top = [&](std::size_t end, std::optional<Span> close_span) {
            OpenElement top = std::move(stack.back());
            stack.pop_back();
            top.el.span = span(top.el.open_tag_span.start, end);
            top.el.close_tag_span = close_span;
            append(Child{std::move(top.el)});
        };
        auto in_foreign = [&] {
            return std::any_of(stack.begin(), stack.end(), [](const OpenElement& o) {
                return o.lower_tag == "svg" || o.lower_tag == "math";
            });
        };

        while (i < n_) {
            if (s_[i] != '<') {
                ++i;
                continue;
            }
            if (s_.compare(i, 4, "<!--") == 0) {
                flush_text(i);
                const auto end = s_.find("-->", i + 4);
                const auto stop = end == std::string_view::npos ? n_ : end + 3;
                if (end == std::string_view::npos) warn(i, n_, "unterminated comment");
                tree_.comments.push_back(span(i, stop));
                i = stop;
                text_start = i;
                continue;
            }
            if (at(i + 1) == '!' || at(i + 1) == '?') {
                flush_text(i);
                const auto end = s_.find('>', i);
                i = end == std::string_view::npos ? n_ : end + 1;
                text_start = i;
                continue;
            }
            if (at(i + 1) == '/' && std::isalpha(static_cast<unsigned char>(at(i + 2)))) {
                flush_text(i);
                auto j = i + 2;
                while (j < n_ && !is_space(s_[j]) && s_[j] != '>') ++j;
                const auto name = lower(s_.substr(i + 2, j - i - 2));
                const auto gt = s_.find('>', j);
                const auto stop = gt == std::string_view::npos ? n_ : gt + 1;
                auto match = std::find_if(stack.rbegin(), stack.rend(),
                                          [&](const OpenElement& o) { return o.lower_tag == name; });
                if (match == stack.rend()) {
                    warn(i, stop, "stray closing tag </" + name + ">");
                } else {
                    const auto depth_to_close = static_cast<std::size_t>(std::distance(stack.rbegin(), match));
                    for (std::size_t k = 0; k < depth_to_close; ++k) {
                        if (!contains(kOptionalEndTag, stack.back().lower_tag)) {
                            warn(stack.back().el.open_tag_span.start, stack.back().el.open_tag_span.end,
                                 "missing closing tag for <" + stack.back().el.tag + ">");
                        }
                        close_top(i, std::nullopt);
                    }
                    close_top(stop, span(i, stop));
                }
                i = stop;
                text_start = i;
                continue;
            }
            if (!std::isalpha(static_cast<unsigned char>(at(i + 1)))) {
                ++i;
                continue;
            }

            flush_text(i);
            const auto lt = i;
            auto j = i + 1;
            while (j < n_ && !is_space(s_[j]) && s_[j] != '>' && s_[j] != '/') ++j;
            ElementNode el;
            el.tag = std::string(s_.substr(i + 1, j - i - 1));
            const auto lower_tag = lower(el.tag);
            bool slash_close = false;
            bool terminated = false;
            while (j < n_) {
                while (j < n_ && is_space(s_[j])) ++j;
                if (j >= n_) break;
                if (s_[j] == '>') {
                    ++j;
                    terminated = true;
                    break;
                }
                if (s_[j] == '/') {
                    if (at(j + 1) == '>') {
                        slash_close = true;
                        j += 2;
                        terminated = true;
                        break;
                    }
                    ++j;
                    continue;
                }
                const auto name_start = j;
                ++j;  // always consume one char so malformed input makes progress
                while (j < n_ && !is_space(s_[j]) && s_[j] != '/' && s_[j] != '>' && s_[j] != '=') ++j;
                Attribute attr;
                attr.name = std::string(s_.substr(name_start, j - name_start));
                auto k = j;
                while (k < n_ && is_space(s_[k])) ++k;
                if (at(k) != '=') {
                    attr.value.kind = ValueKind::BareTrue;
                    attr.span = span(name_start, j);
                    el.attributes.push_back(std::move(attr));
                    continue;
                }
                ++k;
                while (k < n_ && is_space(s_[k])) ++k;
                std::size_t value_start = k;
                std::size_t value_end = k;
                std::string_view literal;
                if (at(k) == '"' || at(k) == '\'') {
                    const auto close = s_.find(s_[k], k + 1);
                    if (close == std::string_view::npos) {
                        warn(k, n_, "unterminated attribute string");
                        value_end = n_;
                        literal = s_.substr(k + 1);
                    } else {
                        value_end = close + 1;
                        literal = s_.substr(k + 1, close - k - 1);
                    }
                } else {
                    while (value_end < n_ && !is_space(s_[value_end]) && s_[value_end] != '>') ++value_end;
                    literal = s_.substr(k, value_end - k);
                }
                attr.value.kind = ValueKind::StringLiteral;
                attr.value.raw = std::string(s_.substr(value_start, value_end - value_start));
                attr.value.literal = decode_entities(literal);
                attr.span = span(name_start, value_end);
                el.attributes.push_back(std::move(attr));
                j = value_end;
            }
            if (!terminated) {
                warn(lt, n_, "unterminated tag <" + el.tag + ">");
                i = n_;
                text_start = n_;
                break;
            }
            el.open_tag_span = span(lt, j);

            while (!stack.empty() && closes_implicitly(stack.back().lower_tag, lower_tag)) {
                close_top(lt, std::nullopt);
            }

            const bool foreign = in_foreign() || lower_tag == "svg" || lower_tag == "math";
            if (contains(kVoidElements, lower_tag) || (slash_close && foreign)) {
                el.self_closing = true;
                el.span = el.open_tag_span;
                append(Child{std::move(el)});
                i = j;
                text_start = i;
                continue;
            }
            if (contains(kRawTextElements, lower_tag)) {
                const auto needle = "</" + lower_tag;
                std::size_t close = std::string_view::npos;
                for (auto p = s_.find("</", j); p != std::string_view::npos; p = s_.find("</", p + 2)) {
                    if (lower(s_.substr(p, needle.size())) == needle) {
                        close = p;
                        break;
                    }
                }
                if (close == std::string_view::npos) {
                    warn(el.open_tag_span.start, el.open_tag_span.end, "unclosed <" + el.tag + ">");
                    if (j < n_) el.children.push_back(Child{TextNode{std::string(s_.substr(j)), span(j, n_)}});
                    el.span = span(lt, n_);
                    append(Child{std::move(el)});
                    i = n_;
                    text_start = n_;
                    break;
                }
                if (close > j) {
                    el.children.push_back(Child{TextNode{std::string(s_.substr(j, close - j)), span(j, close)}});
                }
                const auto gt = s_.find('>', close);
                const auto stop = gt == std::string_view::npos ? n_ : gt + 1;
                el.close_tag_span = span(close, stop);
                el.span = span(lt, stop);
                append(Child{std::move(el)});
                i = stop;
                text_start = i;
                continue;
            }
            stack.push_back(OpenElement{std::move(el), lower_tag});
            i = j;
            text_start = i;
        }
        flush_text(std::min(i, n_));
        while (!stack.empty()) {
            if (!contains(kOptionalEndTag, stack.back().lower_tag)) {
                warn(stack.back().el.open_tag_span.start, stack.back().el.open_tag_span.end,
                     "unclosed <" + stack.back().el.tag + ">");
            }
            close_top(n_, std::nullopt);
        }
    }

    const SourceDocument& doc_;
    std::string_view s_;
    std::size_t n_;
    ElementTree tree_;
};

bool children_equal(const std::vector<Child>& a, const std::vector<Child>& b);

}  // namespace

bool TextNode::blank() const noexcept {
    return std::all_of(text.begin(), text.end(), [](char c) { return is_space(c); });
}

const Span& Child::span() const noexcept {
    return std::visit([](const auto& n) -> const Span& { return n.span; }, node);
}

ElementTree parse_document(const SourceDocument& doc) {
    return Parser(doc).run();
}

bool is_custom_component(const ElementNode& element, Flavor flavor) {
    if (flavor == Flavor::Html || element.tag.empty()) return false;
    if (element.tag.find('.') != std::string::npos) return true;
    return !std::islower(static_cast<unsigned char>(element.tag.front()));
}

namespace {

bool children_equal(const std::vector<Child>& a, const std::vector<Child>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].node.index() != b[i].node.index()) return false;
        if (const auto* ea = a[i].element()) {
            if (!structurally_equal(*ea, *b[i].element())) return false;
        } else if (const auto* ta = a[i].text()) {
            if (ta->text != b[i].text()->text) return false;
        } else if (a[i].expression()->raw != b[i].expression()->raw) {
            return false;
        }
    }
    return true;
}

}  // namespace

bool structurally_equal(const ElementNode& a, const ElementNode& b) {
    if (a.tag != b.tag || a.self_closing != b.self_closing) return false;
    if (a.attributes.size() != b.attributes.size()) return false;
    for (std::size_t i = 0; i < a.attributes.size(); ++i) {
        const auto& x = a.attributes[i];
        const auto& y = b.attributes[i];
        if (x.name != y.name || x.value.kind != y.value.kind || x.value.raw != y.value.raw) return false;
    }
    return children_equal(a.children, b.children);
}

}  // namespace a11y::markup
