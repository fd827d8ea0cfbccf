#include "a11y/markup.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "a11y/errors.hpp"

namespace a11y::markup {

std::string_view to_string(Flavor flavor) {
    switch (flavor) {
        case Flavor::Html: return "html";
        case Flavor::Jsx: return "jsx";
        case Flavor::Tsx: return "tsx";
    }
    return "html";
}

namespace {

std::string extension_of(std::string_view path) {
    auto slash = path.find_last_of("/\\");
    auto dot = path.find_last_of('.');
    if (dot == std::string_view::npos || (slash != std::string_view::npos && dot < slash)) return {};
    std::string ext(path.substr(dot));
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

}  // namespace

std::optional<Flavor> flavor_for_path(std::string_view path) {
    const auto ext = extension_of(path);
    if (ext == ".html" || ext == ".htm") return Flavor::Html;
    if (ext == ".js" || ext == ".jsx" || ext == ".mjs" || ext == ".cjs") return Flavor::Jsx;
    if (ext == ".ts" || ext == ".tsx" || ext == ".mts" || ext == ".cts") return Flavor::Tsx;
    return std::nullopt;
}

bool is_valid_utf8(std::string_view text) {
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (c < 0x80) {
            ++i;
            continue;
        }
        std::size_t len = 0;
        std::uint32_t cp = 0;
        if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > n) return false;
        for (std::size_t k = 1; k < len; ++k) {
            const auto cc = static_cast<unsigned char>(text[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        // overlong forms, surrogates, out of range
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
            cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            return false;
        }
        i += len;
    }
    return true;
}

SourceDocument SourceDocument::from_text(std::string path, std::string text,
                                         std::optional<Flavor> flavor) {
    if (!is_valid_utf8(text)) {
        throw EncodingError("'" + path + "' is not valid UTF-8");
    }
    SourceDocument doc;
    if (flavor) {
        doc.flavor_ = *flavor;
    } else {
        auto derived = flavor_for_path(path);
        if (!derived) throw ConfigError("cannot derive flavor from path '" + path + "'");
        doc.flavor_ = *derived;
    }
    const auto ext = extension_of(path);
    doc.markup_enabled_ = !(ext == ".ts" || ext == ".mts" || ext == ".cts");
    doc.path_ = std::move(path);
    doc.text_ = std::move(text);
    doc.line_starts_.push_back(0);
    for (std::size_t i = 0; i < doc.text_.size(); ++i) {
        if (doc.text_[i] == '\n') doc.line_starts_.push_back(i + 1);
    }
    return doc;
}

SourceDocument SourceDocument::load(const std::string& path, std::optional<Flavor> flavor) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(path, buf.str(), flavor);
}

LineCol SourceDocument::position(std::size_t offset) const {
    if (offset > text_.size()) {
        throw RangeError("offset " + std::to_string(offset) + " beyond end of '" + path_ + "'");
    }
    auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
    const auto line_index = static_cast<std::size_t>(std::distance(line_starts_.begin(), it)) - 1;
    return LineCol{static_cast<std::uint32_t>(line_index + 1),
                   static_cast<std::uint32_t>(offset - line_starts_[line_index])};
}

std::size_t SourceDocument::offset(LineCol pos) const {
    if (pos.line == 0 || pos.line > line_starts_.size()) {
        throw RangeError("line " + std::to_string(pos.line) + " outside '" + path_ + "'");
    }
    const auto begin = line_starts_[pos.line - 1];
    const auto line_end = pos.line < line_starts_.size() ? line_starts_[pos.line] - 1 : text_.size();
    if (begin + pos.col > line_end) {
        throw RangeError("column " + std::to_string(pos.col) + " past end of line " +
                         std::to_string(pos.line));
    }
    return begin + pos.col;
}

Span SourceDocument::span(std::size_t start, std::size_t end) const {
    if (start > end || end > text_.size()) {
        throw RangeError("span [" + std::to_string(start) + ", " + std::to_string(end) +
                         ") outside '" + path_ + "'");
    }
    const auto a = position(start);
    const auto b = position(end);
    return Span{start, end, a.line, a.col, b.line, b.col};
}

std::string slice(const SourceDocument& doc, const Span& span) {
    if (span.start > span.end || span.end > doc.text().size()) {
        throw RangeError("span [" + std::to_string(span.start) + ", " + std::to_string(span.end) +
                         ") outside '" + doc.path() + "'");
    }
    return doc.text().substr(span.start, span.end - span.start);
}

}  // namespace a11y::markup
