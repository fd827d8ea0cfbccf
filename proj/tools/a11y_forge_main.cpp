#include <iostream>

#include <CLI11.hpp>

#include "a11y/cli.hpp"
#include "a11y/errors.hpp"

namespace cli = a11y::cli;

int main(int argc, char** argv) {
    CLI::App app{"Accessibility linting and model-assisted repair for JSX, TSX and HTML"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", "a11y-forge 0.3.0");

    cli::CommonOptions common;
    std::string config;
    std::string rules;
    std::string provider;
    std::string model;
    std::string endpoint;
    std::string out_dir;
    app.add_option("--config", config, "Engine config file (default: ./a11y-forge.toml when present)");
    app.add_option("--rules", rules, "Comma separated rule ids to enable");
    app.add_option("--provider", provider, "Model provider")->check(CLI::IsMember({"replay", "live"}));
    app.add_option("--model", model, "Model name for the live provider");
    app.add_option("--endpoint", endpoint, "Ollama endpoint for the live provider");
    app.add_option("--fixtures", common.fixtures, "Replay fixture directory (repeatable)")
        ->expected(1)
        ->allow_extra_args(false)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    app.add_flag("--no-dedupe", common.no_dedupe, "Keep duplicate findings in CheckAndFix reports");
    app.add_option("--out-dir", out_dir, "Directory for sidecars, reports and evaluation output");
    app.add_flag("--json", common.json, "Machine-readable output");
    app.add_option("--jobs", common.jobs, "Parallel workers for scan and eval (0: one per core)");

    auto* scan = app.add_subcommand("scan", "Report diagnostics for files");
    std::vector<std::string> scan_paths;
    scan->add_option("paths", scan_paths, "Files to scan")->required();

    auto* fix = app.add_subcommand("fix", "Ask the model for fixes to linter diagnostics");
    std::string fix_path;
    cli::FixTarget target;
    std::uint32_t line = 0;
    fix->add_option("path", fix_path, "Source file")->required();
    auto* line_opt = fix->add_option("--line", line, "Only diagnostics on this 1-based line");
    auto* all_flag = fix->add_flag("--all", target.all, "All diagnostics in the file");
    line_opt->excludes(all_flag);

    auto* check = app.add_subcommand("check", "Detect and fix issues in a selection, writing a report");
    std::string check_path;
    std::string from;
    std::string to;
    check->add_option("path", check_path, "Source file")->required();
    auto* from_opt = check->add_option("--from", from, "Selection start as LINE:COL (1-based line, 0-based col)");
    auto* to_opt = check->add_option("--to", to, "Selection end as LINE:COL");

    auto* eval = app.add_subcommand("eval", "Evaluate both workflows over a labeled corpus");
    std::string corpus;
    std::vector<std::string> use_case_names;
    eval->add_option("corpus", corpus, "Corpus directory (containing cases/)")->required();
    eval->add_option("--use-case", use_case_names, "fix or check (repeatable; default both)");

    auto* serve = app.add_subcommand("serve", "Run the language server on stdio");
    serve->add_flag("--stdio", "Accepted for editor compatibility; stdio is the only transport");

    auto* config_cmd = app.add_subcommand("config", "Show or create the engine configuration");
    config_cmd->require_subcommand(1);
    auto* show = config_cmd->add_subcommand("show", "Print the resolved configuration");
    auto* init = config_cmd->add_subcommand("init", "Write a commented a11y-forge.toml");
    std::string init_dir = ".";
    init->add_option("dir", init_dir, "Directory to write into");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::kOk : cli::kError;
    }

    if (!config.empty()) common.config = config;
    if (!rules.empty()) common.rules = rules;
    if (!provider.empty()) common.provider = provider;
    if (!model.empty()) common.model = model;
    if (!endpoint.empty()) common.endpoint = endpoint;
    if (!out_dir.empty()) common.out_dir = out_dir;

    cli::Streams io{std::cout, std::cerr};
    if (*scan) return cli::cmd_scan(scan_paths, common, io);
    if (*fix) {
        if (*line_opt) target.line = line;
        return cli::cmd_fix(fix_path, target, common, io);
    }
    if (*check) {
        std::optional<std::string> f;
        std::optional<std::string> t;
        if (*from_opt) f = from;
        if (*to_opt) t = to;
        return cli::cmd_check(check_path, f, t, common, io);
    }
    if (*eval) {
        std::vector<a11y::eval::UseCase> use_cases;
        try {
            for (const auto& name : use_case_names) use_cases.push_back(a11y::eval::use_case_from_string(name));
        } catch (const a11y::Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return cli::kError;
        }
        return cli::cmd_eval(corpus, use_cases, common, io);
    }
    if (*serve) return cli::cmd_serve(common, io);
    if (*show) return cli::cmd_config_show(common, io);
    if (*init) return cli::cmd_config_init(init_dir, io);
    return cli::kError;
}
