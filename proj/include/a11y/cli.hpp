#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "a11y/config.hpp"
#include "a11y/evaluator.hpp"

namespace a11y::cli {

enum ExitCode : int { kOk = 0, kFindings = 1, kError = 2 };

struct Streams {
    std::ostream& out;
    std::ostream& err;
};

// Flags shared by every command. Unset values fall back to the config file,
// then to the built-in defaults.
struct CommonOptions {
    std::optional<std::filesystem::path> config;
    std::optional<std::string> rules;  // comma separated ids
    std::optional<std::string> provider;
    std::optional<std::string> model;
    std::optional<std::string> endpoint;
    std::vector<std::filesystem::path> fixtures;
    bool no_dedupe = false;
    std::optional<std::filesystem::path> out_dir;
    bool json = false;
    unsigned jobs = 0;
};

// Defaults, then the config file (explicit, or a11y-forge.toml in `cwd`),
// then A11Y_FORGE_ENDPOINT, then the flags.
config::EngineConfig resolve_config(const CommonOptions& options, const std::filesystem::path& cwd);

// "L:C" with a 1-based line and a 0-based column.
markup::LineCol parse_position(std::string_view text);

int cmd_scan(const std::vector<std::string>& paths, const CommonOptions& options, Streams io);

struct FixTarget {
    std::optional<std::uint32_t> line;
    bool all = false;
};
int cmd_fix(const std::string& path, const FixTarget& target, const CommonOptions& options, Streams io);

int cmd_check(const std::string& path, const std::optional<std::string>& from, const std::optional<std::string>& to,
              const CommonOptions& options, Streams io);

int cmd_eval(const std::string& corpus, const std::vector<eval::UseCase>& use_cases, const CommonOptions& options,
             Streams io);

int cmd_config_show(const CommonOptions& options, Streams io);
int cmd_config_init(const std::filesystem::path& dir, Streams io);

// Runs the language server on stdin/stdout until exit.
int cmd_serve(const CommonOptions& options, Streams io);

}  // namespace a11y::cli
