#include <cctype>
#include <charconv>

#include "a11y/config.hpp"
#include "a11y/errors.hpp"

namespace a11y::config {

namespace {

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    llm::Json parse() {
        llm::Json root = llm::Json::object();
        llm::Json* table = &root;
        while (!done()) {
            skip_blank_and_comments();
            if (done()) break;
            if (peek() == '[') {
                table = &open_table(root);
            } else {
                read_pair(*table);
            }
            end_of_line();
        }
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("config line " + std::to_string(line_) + ": " + what);
    }

    bool done() const { return pos_ >= text_.size(); }
    char peek() const { return done() ? '\0' : text_[pos_]; }

    char take() {
        const char c = text_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }

    void skip_spaces() {
        while (!done() && (peek() == ' ' || peek() == '\t')) ++pos_;
    }

    void skip_comment() {
        if (peek() != '#') return;
        while (!done() && peek() != '\n') ++pos_;
    }

    void skip_blank_and_comments() {
        while (!done()) {
            skip_spaces();
            skip_comment();
            if (peek() == '\r') ++pos_;
            if (peek() != '\n') return;
            take();
        }
    }

    void end_of_line() {
        skip_spaces();
        skip_comment();
        if (peek() == '\r') ++pos_;
        if (done()) return;
        if (peek() != '\n') fail("unexpected text after value");
        take();
    }

    std::string read_key() {
        skip_spaces();
        if (peek() == '"') return read_basic_string();
        if (peek() == '\'') return read_literal_string();
        std::string key;
        while (!done() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) {
            key += take();
        }
        if (key.empty()) fail("expected a key");
        return key;
    }

    llm::Json& open_table(llm::Json& root) {
        ++pos_;
        if (peek() == '[') fail("arrays of tables are not supported");
        llm::Json* node = &root;
        while (true) {
            const auto key = read_key();
            auto& child = (*node)[key];
            if (child.is_null()) child = llm::Json::object();
            if (!child.is_object()) fail("'" + key + "' is already a value");
            node = &child;
            skip_spaces();
            if (peek() == '.') {
                ++pos_;
                continue;
            }
            if (peek() != ']') fail("expected ']'");
            ++pos_;
            return *node;
        }
    }

    void read_pair(llm::Json& table) {
        const auto key = read_key();
        skip_spaces();
        if (peek() == '.') fail("dotted keys are not supported");
        if (peek() != '=') fail("expected '=' after '" + key + "'");
        ++pos_;
        skip_spaces();
        if (table.contains(key)) fail("duplicate key '" + key + "'");
        table[key] = read_value();
    }

    llm::Json read_value() {
        const char c = peek();
        if (c == '"') {
            if (text_.substr(pos_, 3) == "\"\"\"") fail("multi-line strings are not supported");
            return read_basic_string();
        }
        if (c == '\'') return read_literal_string();
        if (c == '[') return read_array();
        if (c == '{') fail("inline tables are not supported");
        if (text_.substr(pos_, 4) == "true") {
            pos_ += 4;
            return true;
        }
        if (text_.substr(pos_, 5) == "false") {
            pos_ += 5;
            return false;
        }
        return read_number();
    }

    llm::Json read_array() {
        ++pos_;
        llm::Json out = llm::Json::array();
        while (true) {
            skip_blank_and_comments();
            if (done()) fail("unterminated array");
            if (peek() == ']') {
                ++pos_;
                return out;
            }
            out.push_back(read_value());
            skip_blank_and_comments();
            if (peek() == ',') {
                ++pos_;
                continue;
            }
            if (peek() != ']') fail("expected ',' or ']' in array");
        }
    }

    llm::Json read_number() {
        std::string digits;
        bool is_float = false;
        while (!done()) {
            const char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-') {
                digits += c;
            } else if (c == '.' || c == 'e' || c == 'E') {
                digits += c;
                is_float = true;
            } else if (c != '_') {
                break;
            }
            ++pos_;
        }
        if (digits.empty()) fail("expected a value");
        const char* begin = digits.data() + (digits[0] == '+' ? 1 : 0);
        const char* end = digits.data() + digits.size();
        if (is_float) {
            double v = 0;
            auto [p, ec] = std::from_chars(begin, end, v);
            if (ec != std::errc() || p != end) fail("bad number '" + digits + "'");
            return v;
        }
        long long v = 0;
        auto [p, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc() || p != end) fail("bad number '" + digits + "'");
        return v;
    }

    std::string read_literal_string() {
        ++pos_;
        std::string out;
        while (!done() && peek() != '\'' && peek() != '\n') out += take();
        if (peek() != '\'') fail("unterminated string");
        ++pos_;
        return out;
    }

    std::string read_basic_string() {
        ++pos_;
        std::string out;
        while (true) {
            if (done() || peek() == '\n') fail("unterminated string");
            const char c = take();
            if (c == '"') return out;
            if (c != '\\') {
                out += c;
                continue;
            }
            if (done()) fail("unterminated string");
            switch (const char e = take()) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                case 'b': out += '\b'; break;
                case 'f': out += '\f'; break;
                case 'u': append_utf8(out, read_hex(4)); break;
                case 'U': append_utf8(out, read_hex(8)); break;
                default: fail(std::string("unknown escape \\") + e);
            }
        }
    }

    unsigned long read_hex(int n) {
        if (pos_ + n > text_.size()) fail("short unicode escape");
        unsigned long v = 0;
        auto [p, ec] = std::from_chars(text_.data() + pos_, text_.data() + pos_ + n, v, 16);
        if (ec != std::errc() || p != text_.data() + pos_ + n) fail("bad unicode escape");
        pos_ += n;
        if (v > 0x10FFFF || (v >= 0xD800 && v <= 0xDFFF)) fail("invalid code point in escape");
        return v;
    }

    static void append_utf8(std::string& out, unsigned long cp) {
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

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

}  // namespace

llm::Json parse_toml(std::string_view text) { return Reader(text).parse(); }

}  // namespace a11y::config
