#include <algorithm>
#include <charconv>
#include <fstream>
#include <future>
#include <iostream>
#include <thread>

#include "a11y/cli.hpp"
#include "a11y/errors.hpp"
#include "a11y/lsp.hpp"

namespace a11y::cli {

namespace fs = std::filesystem;

namespace {

// Written by `config init`.
constexpr std::string_view kConfigTemplate = R"(# a11y-forge engine configuration

[rules]
# enabled = ["click-events-have-key-events", "img-alt-required"]

[provider]
kind = "replay"            # "replay" or "live"
endpoint = "http://127.0.0.1:11434"
model = "codellama"
temperature = 0.0
seed = 42
fixtures = ["fixtures"]

[templates]
# fix = "prompts/fix.prompt"
# detect = "prompts/detect.prompt"
# chain_fix = "prompts/chain_fix.prompt"

[workflow]
dedupe = true
# output_dir = "a11y-out"
prompt_char_budget = 24000

[lsp]
debounce_ms = 300
)";

std::string position(const markup::Span& s) {
    return std::to_string(s.start_line) + ":" + std::to_string(s.start_col);
}

llm::Json diagnostic_json(const std::string& file, const rules::Diagnostic& d) {
    return {{"file", file},
            {"line", d.span.start_line},
            {"col", d.span.start_col},
            {"end_line", d.span.end_line},
            {"end_col", d.span.end_col},
            {"rule_id", d.rule_id},
            {"criterion", d.wcag_criterion},
            {"message", d.message}};
}

std::string diagnostic_line(const std::string& file, const rules::Diagnostic& d) {
    return file + ":" + position(d.span) + " " + d.rule_id + " [WCAG " + d.wcag_criterion + "] " + d.message;
}

unsigned job_count(unsigned requested) {
    return requested ? requested : std::max(1u, std::thread::hardware_concurrency());
}

std::vector<rules::Diagnostic> lint(const markup::SourceDocument& doc, const config::EngineConfig& cfg) {
    return rules::run_rules(markup::parse_document(doc), doc, cfg.rules());
}

// Maps engine errors to the error exit code with one stderr line.
template <typename Fn>
int guarded(Streams io, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        io.err << "error: " << e.what() << "\n";
        return kError;
    }
}

}  // namespace

config::EngineConfig resolve_config(const CommonOptions& options, const fs::path& cwd) {
    config::EngineConfig cfg;
    if (options.config) {
        cfg = config::load_config(options.config->is_absolute() ? *options.config : cwd / *options.config);
    } else if (auto found = config::find_config(cwd)) {
        cfg = config::load_config(*found);
    }
    config::apply_environment(cfg);
    if (options.rules) cfg.enabled_rules = config::parse_rule_list(*options.rules);
    if (options.provider) {
        if (*options.provider == "replay") {
            cfg.provider = config::ProviderKind::Replay;
        } else if (*options.provider == "live") {
            cfg.provider = config::ProviderKind::Live;
        } else {
            throw ConfigError("--provider must be replay or live, not '" + *options.provider + "'");
        }
    }
    if (options.model) cfg.model = *options.model;
    if (options.endpoint) cfg.endpoint = *options.endpoint;
    if (!options.fixtures.empty()) {
        cfg.fixtures.clear();
        for (const auto& f : options.fixtures) cfg.fixtures.push_back(f.is_absolute() ? f : cwd / f);
    }
    if (options.no_dedupe) cfg.dedupe = false;
    if (options.out_dir) cfg.output_dir = options.out_dir->is_absolute() ? *options.out_dir : cwd / *options.out_dir;
    if (cfg.enabled_rules) {
        for (const auto& id : *cfg.enabled_rules) {
            if (!rules::find_rule(id)) throw ConfigError("unknown rule id '" + id + "'");
        }
    }
    return cfg;
}

markup::LineCol parse_position(std::string_view text) {
    const auto colon = text.find(':');
    markup::LineCol pos;
    auto number = [&](std::string_view part, std::uint32_t& v) {
        auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        return ec == std::errc() && p == part.data() + part.size() && !part.empty();
    };
    if (colon == std::string_view::npos || !number(text.substr(0, colon), pos.line) ||
        !number(text.substr(colon + 1), pos.col) || pos.line == 0) {
        throw ConfigError("position '" + std::string(text) + "' is not LINE:COL (1-based line, 0-based column)");
    }
    return pos;
}

int cmd_scan(const std::vector<std::string>& paths, const CommonOptions& options, Streams io) {
    return guarded(io, [&] {
        const auto cfg = resolve_config(options, fs::current_path());
        struct FileResult {
            std::vector<rules::Diagnostic> diagnostics;
            std::string error;
        };
        std::vector<FileResult> results(paths.size());
        const auto jobs = job_count(options.jobs);
        for (std::size_t begin = 0; begin < paths.size(); begin += jobs) {
            const auto end = std::min(paths.size(), begin + jobs);
            std::vector<std::future<FileResult>> batch;
            for (std::size_t i = begin; i < end; ++i) {
                batch.push_back(std::async(std::launch::async, [&, i] {
                    FileResult r;
                    try {
                        r.diagnostics = lint(markup::SourceDocument::load(paths[i]), cfg);
                    } catch (const Error& e) {
                        r.error = e.what();
                    }
                    return r;
                }));
            }
            for (std::size_t i = begin; i < end; ++i) results[i] = batch[i - begin].get();
        }

        bool any_error = false;
        bool any_finding = false;
        auto json = llm::Json{{"diagnostics", llm::Json::array()}, {"errors", llm::Json::array()}};
        for (std::size_t i = 0; i < paths.size(); ++i) {
            if (!results[i].error.empty()) {
                any_error = true;
                io.err << paths[i] << ": " << results[i].error << "\n";
                json["errors"].push_back({{"file", paths[i]}, {"message", results[i].error}});
                continue;
            }
            for (const auto& d : results[i].diagnostics) {
                any_finding = true;
                if (options.json) {
                    json["diagnostics"].push_back(diagnostic_json(paths[i], d));
                } else {
                    io.out << diagnostic_line(paths[i], d) << "\n";
                }
            }
        }
        if (options.json) io.out << json.dump(2) << "\n";
        return any_error ? kError : any_finding ? kFindings : kOk;
    });
}

int cmd_fix(const std::string& path, const FixTarget& target, const CommonOptions& options, Streams io) {
    return guarded(io, [&]() -> int {
        if (target.all == target.line.has_value()) throw ConfigError("fix needs exactly one of --line or --all");
        const auto cfg = resolve_config(options, fs::current_path());
        const auto doc = markup::SourceDocument::load(path);
        auto diagnostics = lint(doc, cfg);
        if (target.line) {
            const auto n = *target.line;
            std::erase_if(diagnostics, [n](const rules::Diagnostic& d) {
                return d.span.start_line > n || d.span.end_line < n;
            });
            if (diagnostics.empty()) throw PreconditionError("no diagnostics at line " + std::to_string(n));
        }
        if (diagnostics.empty()) {
            if (options.json) {
                io.out << llm::Json{{"file", path}, {"diagnostics", 0}}.dump(2) << "\n";
            } else {
                io.out << "no diagnostics in " << path << "\n";
            }
            return kOk;
        }
        auto provider = cfg.make_provider();
        auto workflow = cfg.workflow_options();
        const auto result = workflows::run_fix_with_ai(doc, diagnostics, *provider, workflow);
        if (options.json) {
            auto suggestions = llm::Json::array();
            for (const auto& s : result.suggestions) {
                suggestions.push_back({{"error_description", s.error_description},
                                       {"offending_code", s.offending_code},
                                       {"fix_description", s.fix_description},
                                       {"fixed_code", s.fixed_code}});
            }
            llm::Json j{{"file", path},
                        {"code_span", position(result.source_span)},
                        {"ok", result.ok()},
                        {"sidecar", result.sidecar_path.string()},
                        {"annotation_id", result.annotation_id},
                        {"annotation", result.annotation_text},
                        {"suggestions", suggestions}};
            io.out << j.dump(2) << "\n";
        } else if (result.ok()) {
            io.out << result.annotation_text;
            io.out << "sidecar: " << result.sidecar_path.string() << "\n";
        }
        if (!result.ok()) {
            io.err << "error: the model response could not be parsed; raw text saved to "
                   << result.sidecar_path.string() << "\n";
            return kError;
        }
        return kOk;
    });
}

int cmd_check(const std::string& path, const std::optional<std::string>& from, const std::optional<std::string>& to,
              const CommonOptions& options, Streams io) {
    return guarded(io, [&]() -> int {
        const auto cfg = resolve_config(options, fs::current_path());
        const auto doc = markup::SourceDocument::load(path);
        const auto start = from ? doc.offset(parse_position(*from)) : 0;
        const auto end = to ? doc.offset(parse_position(*to)) : doc.text().size();
        if (start > end) throw ConfigError("--from lies after --to");
        const auto selection = doc.span(start, end);
        auto provider = cfg.make_provider();
        const auto result = workflows::run_check_and_fix(doc, selection, *provider, cfg.workflow_options());
        const auto& report = result.report;
        const auto errors = result.dedupe.unique.size();
        if (options.json) {
            llm::Json j{{"file", path},
                        {"report", result.report_path.string()},
                        {"status", std::string(workflows::to_string(report.status))},
                        {"errors", errors},
                        {"duplicates_removed", report.metadata.duplicates_removed}};
            io.out << j.dump(2) << "\n";
        } else {
            io.out << result.report_path.string() << "\n";
        }
        switch (report.status) {
            case workflows::ReportStatus::Complete: return errors ? kFindings : kOk;
            case workflows::ReportStatus::DetectFailed:
                io.err << "error: the detection response could not be parsed; see the report\n";
                return kError;
            case workflows::ReportStatus::ChainFailed:
                io.err << "error: the fix response could not be parsed; see the report\n";
                return kError;
            case workflows::ReportStatus::Cancelled: return kError;
        }
        return kError;
    });
}

int cmd_eval(const std::string& corpus_dir, const std::vector<eval::UseCase>& use_cases, const CommonOptions& options,
             Streams io) {
    return guarded(io, [&]() -> int {
        auto cfg = resolve_config(options, fs::current_path());
        const auto corpus = eval::load_corpus(corpus_dir);
        if (cfg.provider == config::ProviderKind::Replay && cfg.fixtures.empty()) {
            for (const auto& c : corpus) {
                if (fs::is_directory(c.dir / "fixtures")) cfg.fixtures.push_back(c.dir / "fixtures");
            }
        }
        auto provider = cfg.make_provider();
        eval::EvalOptions eo;
        if (!use_cases.empty()) eo.use_cases = use_cases;
        eo.workflow = cfg.workflow_options();
        eo.jobs = options.jobs;
        const auto summary = eval::evaluate_corpus(corpus, *provider, eo);
        const auto out_dir = cfg.output_dir.value_or(fs::current_path() / "a11y-eval");
        eval::write_results(summary, out_dir);
        if (options.json) {
            io.out << summary.results_json().dump(2) << "\n";
        } else {
            io.out << summary.summary_text();
        }
        bool errored = false;
        bool incorrect = false;
        for (const auto& o : summary.outcomes) {
            errored = errored || o.status == eval::RunStatus::Errored;
            incorrect = incorrect || (o.verdict && o.verdict->classification == eval::Classification::Incorrect);
        }
        if (errored) io.err << "error: some cases could not be evaluated; see results.json\n";
        return errored ? kError : incorrect ? kFindings : kOk;
    });
}

int cmd_config_show(const CommonOptions& options, Streams io) {
    return guarded(io, [&] {
        const auto cfg = resolve_config(options, fs::current_path());
        if (options.json) {
            io.out << config::parse_toml(config::render_config(cfg)).dump(2) << "\n";
        } else {
            io.out << config::render_config(cfg);
        }
        return kOk;
    });
}

int cmd_config_init(const fs::path& dir, Streams io) {
    return guarded(io, [&] {
        const auto path = dir / config::kConfigFileName;
        if (fs::exists(path)) throw PreconditionError(path.string() + " already exists");
        std::ofstream f(path, std::ios::binary);
        if (!f) throw IoError("cannot write " + path.string());
        f << kConfigTemplate;
        io.out << path.string() << "\n";
        return kOk;
    });
}

int cmd_serve(const CommonOptions& options, Streams io) {
    return guarded(io, [&] {
        const auto cfg = resolve_config(options, fs::current_path());
        lsp::Server server(cfg);
        return server.run(std::cin, io.out) ? kOk : kError;
    });
}

}  // namespace a11y::cli
