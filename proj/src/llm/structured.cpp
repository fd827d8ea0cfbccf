#include <algorithm>
#include <cctype>

#include "a11y/llm.hpp"

namespace a11y::llm {

namespace {

struct Alias {
    std::string_view key;
    std::string_view canonical;
};

constexpr Alias kAliases[] = {
    {"error_description", "error_description"},
    {"offending_code", "offending_code"},
    {"fix_description", "fix_description"},
    {"fixed_code", "fixed_code"},
    {"criterion", "criterion"},
    {"descrizione_errore", "error_description"},
    {"codice_generatore", "offending_code"},
    {"descrizione_risoluzione", "fix_description"},
    {"codice_fix", "fixed_code"},
    {"criterio", "criterion"},
};

// Labels that count as a field in the readable-text fallback.
std::vector<std::string_view> labels_for(std::string_view canonical) {
    std::vector<std::string_view> out;
    for (const auto& a : kAliases) {
        if (a.canonical == canonical) out.push_back(a.key);
    }
    return out;
}

constexpr std::size_t kReadableBytesPerRecord = 1500;
constexpr int kMaxScanCandidates = 64;

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::optional<Json> try_parse(std::string_view text, std::string& detail) {
    auto parsed = Json::parse(text.begin(), text.end(), nullptr, false);
    if (parsed.is_discarded()) {
        detail = "not valid JSON";
        return std::nullopt;
    }
    if (!parsed.is_array() && !parsed.is_object()) {
        detail = "JSON is not an array or object";
        return std::nullopt;
    }
    return parsed;
}

// Content of the first ``` fenced block, without the info string.
std::optional<std::string_view> fenced_content(std::string_view raw) {
    const auto open = raw.find("```");
    if (open == std::string_view::npos) return std::nullopt;
    auto body_start = raw.find('\n', open + 3);
    if (body_start == std::string_view::npos) return std::nullopt;
    ++body_start;
    const auto close = raw.find("```", body_start);
    if (close == std::string_view::npos) return std::nullopt;
    return raw.substr(body_start, close - body_start);
}

// End (exclusive) of the bracketed value starting at `start`, honoring
// JSON string literals.
std::optional<std::size_t> balanced_end(std::string_view s, std::size_t start) {
    std::vector<char> stack;
    bool in_string = false;
    for (std::size_t i = start; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            if (c == '\\') {
                ++i;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        switch (c) {
            case '"': in_string = true; break;
            case '[': stack.push_back(']'); break;
            case '{': stack.push_back('}'); break;
            case ']':
            case '}':
                if (stack.empty() || stack.back() != c) return std::nullopt;
                stack.pop_back();
                if (stack.empty()) return i + 1;
                break;
            default: break;
        }
    }
    return std::nullopt;
}

// A candidate found by scanning prose must look like a response: an object,
// or an array that is empty or holds only objects.
bool looks_like_payload(const Json& value) {
    if (value.is_object()) return true;
    if (!value.is_array()) return false;
    return std::all_of(value.begin(), value.end(), [](const Json& v) { return v.is_object(); });
}

std::string field_text(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return {};
    return v.dump(-1, ' ', false, Json::error_handler_t::replace);
}

Record to_record(const Json& element, SchemaId schema) {
    Record r;
    r.raw = element;
    r.is_object = element.is_object();
    if (!r.is_object) return r;
    const auto fields = schema_fields(schema);
    for (const auto& [key, value] : element.items()) {
        const auto canonical = canonical_field(key);
        const bool in_schema =
            canonical && std::any_of(fields.begin(), fields.end(), [&](const auto& f) { return f.first == *canonical; });
        if (!in_schema) {
            r.extra_fields.push_back(key);
            continue;
        }
        r.fields.emplace(*canonical, field_text(value));
    }
    return r;
}

void fill_records(ParseResult& result, SchemaId schema) {
    const Json* list = nullptr;
    if (result.value.is_array()) {
        list = &result.value;
    } else if (result.value.is_object() && result.value.size() == 1 && result.value.begin()->is_array()) {
        list = &*result.value.begin();
    }
    if (!list) return;
    result.list_shaped = true;
    for (const auto& element : *list) result.records.push_back(to_record(element, schema));
}

bool has_label(std::string_view text_lower, std::string_view label) {
    for (std::size_t pos = text_lower.find(label); pos != std::string_view::npos;
         pos = text_lower.find(label, pos + 1)) {
        auto rest = text_lower.substr(pos + label.size());
        if (!rest.empty() && rest.front() == '"') rest.remove_prefix(1);
        while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t')) rest.remove_prefix(1);
        if (!rest.empty() && rest.front() == ':') return true;
    }
    return false;
}

std::size_t count_label(std::string_view text_lower, std::string_view label) {
    std::size_t n = 0;
    for (std::size_t pos = text_lower.find(label); pos != std::string_view::npos;
         pos = text_lower.find(label, pos + 1)) {
        ++n;
    }
    return n;
}

bool is_readable(std::string_view raw, SchemaId schema) {
    const auto text = lower(raw);
    for (const auto& [field, required] : schema_fields(schema)) {
        const auto labels = labels_for(field);
        const bool found = std::any_of(labels.begin(), labels.end(), [&](auto l) { return has_label(text, l); });
        if (!found) return false;
    }
    std::size_t records = 0;
    for (auto l : labels_for("error_description")) records += count_label(text, l);
    return raw.size() <= kReadableBytesPerRecord * std::max<std::size_t>(records, 1);
}

}  // namespace

std::optional<std::string> canonical_field(std::string_view key) {
    const auto k = lower(key);
    for (const auto& a : kAliases) {
        if (a.key == k) return std::string(a.canonical);
    }
    return std::nullopt;
}

std::vector<std::pair<std::string, bool>> schema_fields(SchemaId schema) {
    switch (schema) {
        case SchemaId::Findings:
            return {{"error_description", true}, {"offending_code", false}, {"criterion", false}};
        case SchemaId::Fixes:
            return {{"error_description", true},
                    {"offending_code", false},
                    {"fix_description", true},
                    {"fixed_code", true}};
        case SchemaId::ChainFixes:
            return {{"error_description", true},
                    {"offending_code", false},
                    {"criterion", false},
                    {"fix_description", true},
                    {"fixed_code", true}};
    }
    return {};
}

std::string_view to_string(ParseStage stage) {
    switch (stage) {
        case ParseStage::WholeText: return "whole-text";
        case ParseStage::Unfenced: return "unfenced";
        case ParseStage::BalancedScan: return "balanced-scan";
    }
    return "unknown";
}

bool Record::has(std::string_view field) const { return fields.count(std::string(field)) > 0; }

bool Record::populated(std::string_view field) const {
    auto it = fields.find(std::string(field));
    return it != fields.end() && !trim(it->second).empty();
}

std::string Record::get(std::string_view field) const {
    auto it = fields.find(std::string(field));
    return it == fields.end() ? std::string() : it->second;
}

std::vector<DetectionFinding> ParseResult::findings() const {
    std::vector<DetectionFinding> out;
    for (const auto& r : records) {
        if (!r.is_object) continue;
        out.push_back({r.get("error_description"), r.get("offending_code"), r.get("criterion")});
    }
    return out;
}

std::vector<FixSuggestion> ParseResult::fixes() const {
    std::vector<FixSuggestion> out;
    for (const auto& r : records) {
        if (!r.is_object) continue;
        FixSuggestion s{r.get("error_description"), r.get("offending_code"), r.get("fix_description"),
                        r.get("fixed_code"), std::nullopt};
        if (r.has("criterion")) s.criterion = r.get("criterion");
        out.push_back(std::move(s));
    }
    return out;
}

ParseResult parse_structured(std::string_view raw, SchemaId schema) {
    ParseResult result;
    auto succeed = [&](ParseStage stage, Json value) {
        result.attempts.push_back({stage, true, {}});
        result.ok = true;
        result.stage = stage;
        result.value = std::move(value);
        fill_records(result, schema);
        return result;
    };

    std::string detail;
    if (auto v = try_parse(trim(raw), detail)) return succeed(ParseStage::WholeText, std::move(*v));
    result.attempts.push_back({ParseStage::WholeText, false, detail});

    if (auto inner = fenced_content(raw)) {
        if (auto v = try_parse(trim(*inner), detail)) return succeed(ParseStage::Unfenced, std::move(*v));
        result.attempts.push_back({ParseStage::Unfenced, false, detail});
    } else {
        result.attempts.push_back({ParseStage::Unfenced, false, "no fenced block"});
    }

    int candidates = 0;
    for (std::size_t i = 0; i < raw.size() && candidates < kMaxScanCandidates; ++i) {
        if (raw[i] != '[' && raw[i] != '{') continue;
        const auto end = balanced_end(raw, i);
        if (!end) continue;
        ++candidates;
        auto v = Json::parse(raw.begin() + static_cast<std::ptrdiff_t>(i),
                             raw.begin() + static_cast<std::ptrdiff_t>(*end), nullptr, false);
        if (!v.is_discarded() && looks_like_payload(v)) return succeed(ParseStage::BalancedScan, std::move(v));
    }
    result.attempts.push_back({ParseStage::BalancedScan, false,
                               candidates ? "no balanced candidate parsed as a response"
                                          : "no balanced array or object"});
    result.readable = is_readable(raw, schema);
    return result;
}

}  // namespace a11y::llm
