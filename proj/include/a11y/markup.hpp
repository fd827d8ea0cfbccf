#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace a11y::markup {

enum class Flavor { Html, Jsx, Tsx };

std::string_view to_string(Flavor flavor);

// Maps a file extension to a flavor. Returns nullopt for unsupported files.
std::optional<Flavor> flavor_for_path(std::string_view path);

// Byte range plus its 1-based line / 0-based byte column endpoints.
struct Span {
    std::size_t start = 0;
    std::size_t end = 0;
    std::uint32_t start_line = 1;
    std::uint32_t start_col = 0;
    std::uint32_t end_line = 1;
    std::uint32_t end_col = 0;

    std::size_t size() const noexcept { return end - start; }
    bool empty() const noexcept { return start == end; }
    bool contains(const Span& other) const noexcept {
        return start <= other.start && other.end <= end;
    }
    bool overlaps(const Span& other) const noexcept {
        if (empty() || other.empty()) return start >= other.start && start <= other.end;
        return start < other.end && other.start < end;
    }

    friend bool operator==(const Span&, const Span&) = default;
};

struct LineCol {
    std::uint32_t line = 1;  // 1-based
    std::uint32_t col = 0;   // 0-based byte column
};

// An in-memory source file. Immutable once constructed.
class SourceDocument {
public:
    // Validates UTF-8; throws EncodingError otherwise. When `flavor` is not
    // given it is derived from the extension of `path` (unknown extensions
    // are a ConfigError).
    static SourceDocument from_text(std::string path, std::string text,
                                    std::optional<Flavor> flavor = std::nullopt);

    // Reads the file from disk. Throws Error if unreadable.
    static SourceDocument load(const std::string& path,
                               std::optional<Flavor> flavor = std::nullopt);

    const std::string& path() const noexcept { return path_; }
    const std::string& text() const noexcept { return text_; }
    Flavor flavor() const noexcept { return flavor_; }
    const std::vector<std::size_t>& line_starts() const noexcept { return line_starts_; }

    // Plain .ts files cannot contain markup; they parse to an empty tree.
    bool markup_enabled() const noexcept { return markup_enabled_; }

    std::size_t line_count() const noexcept { return line_starts_.size(); }

    LineCol position(std::size_t offset) const;
    // Throws RangeError for positions outside the document.
    std::size_t offset(LineCol pos) const;
    // Throws RangeError when start > end or end > text size.
    Span span(std::size_t start, std::size_t end) const;

private:
    SourceDocument() = default;

    std::string path_;
    std::string text_;
    Flavor flavor_ = Flavor::Html;
    bool markup_enabled_ = true;
    std::vector<std::size_t> line_starts_;
};

// Returns the exact bytes covered by `span`. Throws RangeError when the span
// does not lie within the document.
std::string slice(const SourceDocument& doc, const Span& span);

bool is_valid_utf8(std::string_view text);

enum class ValueKind { StringLiteral, Expression, BareTrue };

struct AttributeValue {
    ValueKind kind = ValueKind::BareTrue;
    std::string raw;                     // verbatim value text, quotes/braces included
    std::optional<std::string> literal;  // decoded, only for StringLiteral
};

struct Attribute {
    std::string name;  // "...rest" for spread attributes
    AttributeValue value;
    Span span;

    bool is_spread() const noexcept { return name.rfind("...", 0) == 0; }
};

struct Child;

struct ElementNode {
    std::string tag;
    std::vector<Attribute> attributes;
    std::vector<Child> children;
    Span span;
    Span open_tag_span;
    std::optional<Span> close_tag_span;
    bool self_closing = false;
};

struct TextNode {
    std::string text;
    Span span;

    bool blank() const noexcept;
};

// An opaque `{...}` expression container in JSX children.
struct ExpressionNode {
    std::string raw;
    Span span;
};

struct Child {
    std::variant<ElementNode, TextNode, ExpressionNode> node;

    const ElementNode* element() const noexcept { return std::get_if<ElementNode>(&node); }
    const TextNode* text() const noexcept { return std::get_if<TextNode>(&node); }
    const ExpressionNode* expression() const noexcept { return std::get_if<ExpressionNode>(&node); }
    const Span& span() const noexcept;
};

struct ParseWarning {
    Span span;
    std::string message;
};

struct ElementTree {
    std::vector<ElementNode> roots;       // ordered by start offset
    std::vector<ParseWarning> warnings;
    std::vector<Span> comments;           // skipped comment regions
};

// Error-tolerant parse. Never throws for any UTF-8 input.
ElementTree parse_document(const SourceDocument& doc);

// Lowercase first letter (and no member access) marks a native element. In
// HTML every tag is native.
bool is_custom_component(const ElementNode& element, Flavor flavor);

// Compares tag, attribute names/kinds/raw values and child shape, ignoring
// spans.
bool structurally_equal(const ElementNode& a, const ElementNode& b);

// Depth-first walk over every element of the tree, parents before children.
// The callback receives the element and its ancestor chain (outermost first).
template <typename Fn>
void walk(const ElementNode& element, std::vector<const ElementNode*>& ancestry, Fn&& fn) {
    fn(element, ancestry);
    ancestry.push_back(&element);
    for (const auto& child : element.children) {
        if (const auto* el = child.element()) walk(*el, ancestry, fn);
    }
    ancestry.pop_back();
}

template <typename Fn>
void walk(const ElementTree& tree, Fn&& fn) {
    std::vector<const ElementNode*> ancestry;
    for (const auto& root : tree.roots) walk(root, ancestry, fn);
}

}  // namespace a11y::markup
