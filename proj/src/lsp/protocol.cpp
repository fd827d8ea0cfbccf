#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <ostream>

#include "a11y/errors.hpp"
#include "a11y/lsp.hpp"

namespace a11y::lsp {

namespace {

// Bytes in the UTF-8 sequence introduced by `lead`.
std::size_t sequence_length(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead >> 5) == 0x6) return 2;
    if ((lead >> 4) == 0xE) return 3;
    return 4;
}

// End of the line's content, before any "\r\n" or "\n".
std::size_t content_end(const markup::SourceDocument& doc, std::size_t line_index) {
    const auto& starts = doc.line_starts();
    const bool last = line_index + 1 == starts.size();
    std::size_t end = last ? doc.text().size() : starts[line_index + 1] - 1;
    if (!last && end > starts[line_index] && doc.text()[end - 1] == '\r') --end;
    return end;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::optional<std::string> read_message(std::istream& in) {
    std::optional<std::size_t> length;
    std::string line;
    bool any_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            if (!any_header) continue;
            break;
        }
        any_header = true;
        const auto colon = line.find(':');
        if (colon == std::string::npos) throw FormatError("malformed header line '" + line + "'");
        auto name = line.substr(0, colon);
        for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (name != "content-length") continue;
        auto value = std::string_view(line).substr(colon + 1);
        while (!value.empty() && value.front() == ' ') value.remove_prefix(1);
        std::size_t n = 0;
        auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
        if (ec != std::errc() || p != value.data() + value.size()) {
            throw FormatError("bad Content-Length '" + std::string(value) + "'");
        }
        length = n;
    }
    if (!any_header) return std::nullopt;
    if (!length) throw FormatError("message without Content-Length");
    std::string body(*length, '\0');
    in.read(body.data(), static_cast<std::streamsize>(body.size()));
    if (static_cast<std::size_t>(in.gcount()) != body.size()) throw FormatError("truncated message body");
    return body;
}

void write_message(std::ostream& out, const Json& message) {
    const auto body = message.dump(-1, ' ', false, Json::error_handler_t::replace);
    out << "Content-Length: " << body.size() << "\r\n\r\n" << body;
    out.flush();
}

std::size_t offset_of(const markup::SourceDocument& doc, Position pos) {
    const auto& starts = doc.line_starts();
    if (pos.line >= starts.size()) return doc.text().size();
    const auto end = content_end(doc, pos.line);
    const std::string_view text = doc.text();
    std::size_t offset = starts[pos.line];
    std::uint32_t units = 0;
    while (offset < end && units < pos.character) {
        const auto len = sequence_length(static_cast<unsigned char>(text[offset]));
        const std::uint32_t width = len == 4 ? 2 : 1;
        if (units + width > pos.character) break;  // inside a surrogate pair
        units += width;
        offset += len;
    }
    return std::min(offset, end);
}

Position position_of(const markup::SourceDocument& doc, std::size_t offset) {
    const auto lc = doc.position(offset);
    const auto start = doc.line_starts()[lc.line - 1];
    const std::string_view text = doc.text();
    std::uint32_t units = 0;
    for (std::size_t i = start; i < offset;) {
        const auto len = sequence_length(static_cast<unsigned char>(text[i]));
        units += len == 4 ? 2 : 1;
        i += len;
    }
    return {lc.line - 1, units};
}

Json range_json(const markup::SourceDocument& doc, std::size_t start, std::size_t end) {
    const auto a = position_of(doc, start);
    const auto b = position_of(doc, end);
    return {{"start", {{"line", a.line}, {"character", a.character}}},
            {"end", {{"line", b.line}, {"character", b.character}}}};
}

std::pair<std::size_t, std::size_t> range_offsets(const markup::SourceDocument& doc, const Json& range) {
    auto pos = [](const Json& p) {
        return Position{p.at("line").get<std::uint32_t>(), p.at("character").get<std::uint32_t>()};
    };
    const auto start = offset_of(doc, pos(range.at("start")));
    const auto end = offset_of(doc, pos(range.at("end")));
    return {std::min(start, end), std::max(start, end)};
}

std::string uri_to_path(std::string_view uri) {
    constexpr std::string_view scheme = "file://";
    if (uri.substr(0, scheme.size()) != scheme) return std::string(uri);
    uri.remove_prefix(scheme.size());
    std::string out;
    for (std::size_t i = 0; i < uri.size(); ++i) {
        if (uri[i] == '%' && i + 2 < uri.size() && hex_value(uri[i + 1]) >= 0 && hex_value(uri[i + 2]) >= 0) {
            out += static_cast<char>(hex_value(uri[i + 1]) * 16 + hex_value(uri[i + 2]));
            i += 2;
        } else {
            out += uri[i];
        }
    }
    return out;
}

std::string path_to_uri(std::string_view path) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out = "file://";
    for (unsigned char c : path) {
        if (std::isalnum(c) || c == '/' || c == '-' || c == '_' || c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += kHex[c >> 4];
            out += kHex[c & 0xF];
        }
    }
    return out;
}

std::string apply_change(const std::string& text, const std::string& path, const Json& change) {
    if (!change.contains("range")) return change.at("text").get<std::string>();
    // The html flavor accepts any path; only offsets matter here.
    const auto doc = markup::SourceDocument::from_text(path, text, markup::Flavor::Html);
    const auto [start, end] = range_offsets(doc, change.at("range"));
    std::string out = text.substr(0, start);
    out += change.at("text").get<std::string>();
    out += text.substr(end);
    return out;
}

}  // namespace a11y::lsp
