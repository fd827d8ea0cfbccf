#include <fstream>
#include <sstream>

#include "a11y/errors.hpp"
#include "a11y/llm.hpp"

namespace a11y::llm {

namespace detail {
extern const std::string_view kFixTemplate;
extern const std::string_view kDetectTemplate;
extern const std::string_view kChainFixTemplate;
}  // namespace detail

namespace {

constexpr std::string_view kPlaceholders[] = {"code", "diagnostics", "findings"};

bool is_placeholder(std::string_view name) {
    for (auto p : kPlaceholders) {
        if (p == name) return true;
    }
    return false;
}

// Calls on_text for literal runs and on_placeholder for each {name}.
template <typename Text, typename Placeholder>
void scan(std::string_view body, Text&& on_text, Placeholder&& on_placeholder) {
    std::size_t literal_start = 0;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] != '{') continue;
        const auto close = body.find('}', i + 1);
        if (close == std::string_view::npos) break;
        const auto name = body.substr(i + 1, close - i - 1);
        if (!is_placeholder(name)) continue;
        on_text(body.substr(literal_start, i - literal_start));
        on_placeholder(std::string(name));
        literal_start = close + 1;
        i = close;
    }
    on_text(body.substr(literal_start));
}

std::set<std::string> required_placeholders(TemplateId id) {
    switch (id) {
        case TemplateId::FixPrompt: return {"code", "diagnostics"};
        case TemplateId::DetectPrompt: return {"code"};
        case TemplateId::ChainFixPrompt: return {"code", "findings"};
    }
    return {};
}

SchemaId schema_for(TemplateId id) {
    switch (id) {
        case TemplateId::FixPrompt: return SchemaId::Fixes;
        case TemplateId::DetectPrompt: return SchemaId::Findings;
        case TemplateId::ChainFixPrompt: return SchemaId::ChainFixes;
    }
    return SchemaId::Findings;
}

}  // namespace

std::string_view to_string(TemplateId id) {
    switch (id) {
        case TemplateId::FixPrompt: return "fix";
        case TemplateId::DetectPrompt: return "detect";
        case TemplateId::ChainFixPrompt: return "chain_fix";
    }
    return "unknown";
}

std::optional<TemplateId> template_from_string(std::string_view name) {
    for (auto id : {TemplateId::FixPrompt, TemplateId::DetectPrompt, TemplateId::ChainFixPrompt}) {
        if (to_string(id) == name) return id;
    }
    return std::nullopt;
}

std::string_view to_string(SchemaId id) {
    switch (id) {
        case SchemaId::Findings: return "findings";
        case SchemaId::Fixes: return "fixes";
        case SchemaId::ChainFixes: return "chain_fixes";
    }
    return "unknown";
}

PromptTemplate PromptTemplate::parse(TemplateId id, std::string_view text) {
    std::size_t sep = std::string_view::npos;
    for (std::size_t pos = 0; pos < text.size();) {
        auto eol = text.find('\n', pos);
        auto line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line == "---") {
            sep = pos;
            break;
        }
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    if (sep == std::string_view::npos) {
        throw TemplateError("template '" + std::string(to_string(id)) +
                            "' has no '---' line separating the system role from the body");
    }
    PromptTemplate tpl;
    tpl.id = id;
    tpl.output_schema = schema_for(id);
    tpl.system_role = std::string(text.substr(0, sep));
    while (!tpl.system_role.empty() && (tpl.system_role.back() == '\n' || tpl.system_role.back() == '\r')) {
        tpl.system_role.pop_back();
    }
    const auto body_start = text.find('\n', sep);
    tpl.body_template = body_start == std::string_view::npos ? std::string() : std::string(text.substr(body_start + 1));

    const auto used = tpl.placeholders();
    for (const auto& name : required_placeholders(id)) {
        if (!used.count(name)) {
            throw TemplateError("template '" + std::string(to_string(id)) + "' does not use {" + name + "}");
        }
    }
    return tpl;
}

std::set<std::string> PromptTemplate::placeholders() const {
    std::set<std::string> names;
    scan(body_template, [](std::string_view) {}, [&](std::string name) { names.insert(std::move(name)); });
    return names;
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& values) const {
    std::string out = system_role;
    out += "\n\n";
    scan(
        body_template, [&](std::string_view text) { out += text; },
        [&](const std::string& name) {
            auto it = values.find(name);
            if (it == values.end()) {
                throw TemplateError("no value for placeholder {" + name + "} in template '" +
                                    std::string(to_string(id)) + "'");
            }
            out += it->second;
        });
    return out;
}

TemplateSet TemplateSet::defaults() {
    TemplateSet set;
    set.set(PromptTemplate::parse(TemplateId::FixPrompt, detail::kFixTemplate));
    set.set(PromptTemplate::parse(TemplateId::DetectPrompt, detail::kDetectTemplate));
    set.set(PromptTemplate::parse(TemplateId::ChainFixPrompt, detail::kChainFixTemplate));
    return set;
}

void TemplateSet::override_from_file(TemplateId id, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read prompt template " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    set(PromptTemplate::parse(id, buf.str()));
}

void TemplateSet::set(PromptTemplate tpl) {
    const auto id = tpl.id;
    templates_.insert_or_assign(id, std::move(tpl));
}

const PromptTemplate& TemplateSet::get(TemplateId id) const {
    auto it = templates_.find(id);
    if (it == templates_.end()) throw TemplateError("no template '" + std::string(to_string(id)) + "'");
    return it->second;
}

}  // namespace a11y::llm
