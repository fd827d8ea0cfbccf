#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "a11y/llm.hpp"
#include "a11y/workflows.hpp"

namespace a11y::config {

inline constexpr std::string_view kConfigFileName = "a11y-forge.toml";
inline constexpr std::string_view kEndpointEnv = "A11Y_FORGE_ENDPOINT";

// Reads the TOML subset the engine configuration uses: tables, string,
// integer, float and boolean values, and arrays of those. Throws
// ConfigError naming the line for anything else.
llm::Json parse_toml(std::string_view text);

enum class ProviderKind { Replay, Live };
std::string_view to_string(ProviderKind kind);

struct EngineConfig {
    std::optional<std::set<std::string>> enabled_rules;  // nullopt runs every rule
    ProviderKind provider = ProviderKind::Replay;
    std::string endpoint = "http://127.0.0.1:11434";
    std::string model = "codellama";
    double temperature = 0.0;
    std::optional<int> seed = 42;
    std::chrono::milliseconds request_timeout{120000};
    std::vector<std::filesystem::path> fixtures;
    std::map<llm::TemplateId, std::filesystem::path> template_overrides;
    bool dedupe = true;
    std::optional<std::filesystem::path> output_dir;
    std::size_t prompt_char_budget = 24000;
    std::chrono::milliseconds debounce{300};

    // Live needs an endpoint and a model, replay needs a fixture directory.
    // Throws ConfigError. Unknown rule ids are rejected here too.
    void validate() const;

    std::set<std::string> rules() const;
    llm::CompletionParams params() const;
    llm::TemplateSet templates() const;
    workflows::WorkflowOptions workflow_options() const;
    std::unique_ptr<llm::Provider> make_provider() const;
};

// Values from `text` layered over the defaults. Relative paths resolve
// against `base_dir`.
EngineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);
EngineConfig load_config(const std::filesystem::path& path);

// `a11y-forge.toml` in `dir`, if present.
std::optional<std::filesystem::path> find_config(const std::filesystem::path& dir);

// Applies A11Y_FORGE_ENDPOINT when set and non-empty.
void apply_environment(EngineConfig& config);

// Comma separated rule ids, blanks ignored.
std::set<std::string> parse_rule_list(std::string_view text);

// Text form of the effective configuration, loadable by parse_config.
std::string render_config(const EngineConfig& config);

}  // namespace a11y::config
