#include <cstdlib>
#include <fstream>
#include <sstream>

#include "a11y/config.hpp"
#include "a11y/errors.hpp"
#include "a11y/rules.hpp"

namespace a11y::config {

namespace fs = std::filesystem;

namespace {

const llm::Json* section(const llm::Json& root, const char* name) {
    if (!root.contains(name)) return nullptr;
    const auto& s = root.at(name);
    if (!s.is_object()) throw ConfigError(std::string("[") + name + "] must be a table");
    return &s;
}

void reject_unknown(const llm::Json& table, const std::string& where, std::initializer_list<std::string_view> known) {
    for (const auto& [key, value] : table.items()) {
        bool ok = false;
        for (auto k : known) ok = ok || key == k;
        if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

std::string get_string(const llm::Json& t, const char* key, const std::string& where) {
    const auto& v = t.at(key);
    if (!v.is_string()) throw ConfigError(where + "." + key + " must be a string");
    return v.get<std::string>();
}

long long get_int(const llm::Json& t, const char* key, const std::string& where, long long min) {
    const auto& v = t.at(key);
    if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
    const auto n = v.get<long long>();
    if (n < min) throw ConfigError(where + "." + key + " must be at least " + std::to_string(min));
    return n;
}

bool get_bool(const llm::Json& t, const char* key, const std::string& where) {
    const auto& v = t.at(key);
    if (!v.is_boolean()) throw ConfigError(where + "." + key + " must be true or false");
    return v.get<bool>();
}

std::vector<std::string> get_strings(const llm::Json& t, const char* key, const std::string& where) {
    const auto& v = t.at(key);
    std::vector<std::string> out;
    if (v.is_string()) {
        out.push_back(v.get<std::string>());
        return out;
    }
    if (!v.is_array()) throw ConfigError(where + "." + key + " must be an array of strings");
    for (const auto& item : v) {
        if (!item.is_string()) throw ConfigError(where + "." + key + " must be an array of strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

std::string quoted(std::string_view s) { return llm::Json(std::string(s)).dump(); }

}  // namespace

std::string_view to_string(ProviderKind kind) { return kind == ProviderKind::Live ? "live" : "replay"; }

std::set<std::string> parse_rule_list(std::string_view text) {
    std::set<std::string> out;
    std::string current;
    auto flush = [&] {
        const auto trimmed = workflows::normalize_whitespace(current);
        if (!trimmed.empty()) out.insert(trimmed);
        current.clear();
    };
    for (char c : text) {
        if (c == ',') {
            flush();
        } else {
            current += c;
        }
    }
    flush();
    return out;
}

EngineConfig parse_config(std::string_view text, const fs::path& base_dir) {
    const auto root = parse_toml(text);
    reject_unknown(root, "the config file", {"rules", "provider", "templates", "workflow", "lsp"});
    EngineConfig c;

    if (const auto* s = section(root, "rules")) {
        reject_unknown(*s, "[rules]", {"enabled"});
        if (s->contains("enabled")) {
            const auto ids = get_strings(*s, "enabled", "rules");
            c.enabled_rules = std::set<std::string>(ids.begin(), ids.end());
        }
    }
    if (const auto* s = section(root, "provider")) {
        reject_unknown(*s, "[provider]", {"kind", "endpoint", "model", "temperature", "seed", "timeout_ms", "fixtures"});
        if (s->contains("kind")) {
            const auto kind = get_string(*s, "kind", "provider");
            if (kind == "replay") {
                c.provider = ProviderKind::Replay;
            } else if (kind == "live") {
                c.provider = ProviderKind::Live;
            } else {
                throw ConfigError("provider.kind must be \"replay\" or \"live\", not \"" + kind + "\"");
            }
        }
        if (s->contains("endpoint")) c.endpoint = get_string(*s, "endpoint", "provider");
        if (s->contains("model")) c.model = get_string(*s, "model", "provider");
        if (s->contains("temperature")) {
            const auto& v = s->at("temperature");
            if (!v.is_number()) throw ConfigError("provider.temperature must be a number");
            c.temperature = v.get<double>();
        }
        if (s->contains("seed")) {
            // `seed = false` sends no seed at all.
            if (s->at("seed") == false) {
                c.seed.reset();
            } else {
                c.seed = static_cast<int>(get_int(*s, "seed", "provider", 0));
            }
        }
        if (s->contains("timeout_ms")) {
            c.request_timeout = std::chrono::milliseconds(get_int(*s, "timeout_ms", "provider", 1));
        }
        if (s->contains("fixtures")) {
            for (const auto& p : get_strings(*s, "fixtures", "provider")) c.fixtures.push_back(resolve(base_dir, p));
        }
    }
    if (const auto* s = section(root, "templates")) {
        for (const auto& [key, value] : s->items()) {
            const auto id = llm::template_from_string(key);
            if (!id) throw ConfigError("unknown template '" + key + "' in [templates]");
            if (!value.is_string()) throw ConfigError("templates." + key + " must be a path");
            c.template_overrides[*id] = resolve(base_dir, value.get<std::string>());
        }
    }
    if (const auto* s = section(root, "workflow")) {
        reject_unknown(*s, "[workflow]", {"dedupe", "output_dir", "prompt_char_budget"});
        if (s->contains("dedupe")) c.dedupe = get_bool(*s, "dedupe", "workflow");
        if (s->contains("output_dir")) c.output_dir = resolve(base_dir, get_string(*s, "output_dir", "workflow"));
        if (s->contains("prompt_char_budget")) {
            c.prompt_char_budget = static_cast<std::size_t>(get_int(*s, "prompt_char_budget", "workflow", 1));
        }
    }
    if (const auto* s = section(root, "lsp")) {
        reject_unknown(*s, "[lsp]", {"debounce_ms"});
        if (s->contains("debounce_ms")) c.debounce = std::chrono::milliseconds(get_int(*s, "debounce_ms", "lsp", 0));
    }
    return c;
}

EngineConfig load_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str(), path.parent_path());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::optional<fs::path> find_config(const fs::path& dir) {
    const auto candidate = dir / kConfigFileName;
    if (fs::is_regular_file(candidate)) return candidate;
    return std::nullopt;
}

void apply_environment(EngineConfig& config) {
    if (const char* v = std::getenv(std::string(kEndpointEnv).c_str()); v && *v) config.endpoint = v;
}

void EngineConfig::validate() const {
    if (enabled_rules) {
        for (const auto& id : *enabled_rules) {
            if (!rules::find_rule(id)) throw ConfigError("unknown rule id '" + id + "'");
        }
    }
    if (provider == ProviderKind::Live) {
        if (endpoint.empty()) throw ConfigError("the live provider needs an endpoint");
        if (model.empty()) throw ConfigError("the live provider needs a model");
    } else if (fixtures.empty()) {
        throw ConfigError("the replay provider needs a fixture directory");
    }
}

std::set<std::string> EngineConfig::rules() const { return enabled_rules.value_or(rules::all_rule_ids()); }

llm::CompletionParams EngineConfig::params() const {
    llm::CompletionParams p;
    p.model = model;
    p.temperature = temperature;
    p.seed = seed;
    return p;
}

llm::TemplateSet EngineConfig::templates() const {
    auto set = llm::TemplateSet::defaults();
    for (const auto& [id, path] : template_overrides) set.override_from_file(id, path);
    return set;
}

workflows::WorkflowOptions EngineConfig::workflow_options() const {
    workflows::WorkflowOptions o;
    o.params = params();
    o.templates = templates();
    o.dedupe = dedupe;
    o.output_dir = output_dir;
    o.prompt_char_budget = prompt_char_budget;
    return o;
}

std::unique_ptr<llm::Provider> EngineConfig::make_provider() const {
    validate();
    if (provider == ProviderKind::Live) {
        return std::make_unique<llm::LiveProvider>(llm::LiveOptions{endpoint, request_timeout});
    }
    return std::make_unique<llm::ReplayProvider>(fixtures);
}

std::string render_config(const EngineConfig& c) {
    std::ostringstream out;
    out << "[rules]\n";
    if (c.enabled_rules) {
        out << "enabled = [";
        bool first = true;
        for (const auto& id : *c.enabled_rules) {
            out << (first ? "" : ", ") << quoted(id);
            first = false;
        }
        out << "]\n";
    }
    out << "\n[provider]\n"
        << "kind = " << quoted(to_string(c.provider)) << "\n"
        << "endpoint = " << quoted(c.endpoint) << "\n"
        << "model = " << quoted(c.model) << "\n"
        << "temperature = " << llm::Json(c.temperature).dump() << "\n";
    out << "seed = " << (c.seed ? std::to_string(*c.seed) : std::string("false")) << "\n";
    out << "timeout_ms = " << c.request_timeout.count() << "\n";
    out << "fixtures = [";
    for (std::size_t i = 0; i < c.fixtures.size(); ++i) out << (i ? ", " : "") << quoted(c.fixtures[i].string());
    out << "]\n";
    if (!c.template_overrides.empty()) {
        out << "\n[templates]\n";
        for (const auto& [id, path] : c.template_overrides) out << llm::to_string(id) << " = " << quoted(path.string()) << "\n";
    }
    out << "\n[workflow]\n"
        << "dedupe = " << (c.dedupe ? "true" : "false") << "\n";
    if (c.output_dir) out << "output_dir = " << quoted(c.output_dir->string()) << "\n";
    out << "prompt_char_budget = " << c.prompt_char_budget << "\n"
        << "\n[lsp]\n"
        << "debounce_ms = " << c.debounce.count() << "\n";
    return out.str();
}

}  // namespace a11y::config
