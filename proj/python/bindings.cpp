#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "a11y/config.hpp"
#include "a11y/errors.hpp"
#include "a11y/evaluator.hpp"
#include "a11y/workflows.hpp"

namespace py = pybind11;
using namespace a11y;

namespace {

// Structured values cross the boundary as JSON text; the Python package
// decodes them.
std::string diagnostics_json(const markup::SourceDocument& doc, const std::vector<rules::Diagnostic>& diags) {
    auto out = llm::Json::array();
    for (const auto& d : diags) {
        out.push_back({{"rule_id", d.rule_id},
                       {"criterion", d.wcag_criterion},
                       {"message", d.message},
                       {"line", d.span.start_line},
                       {"col", d.span.start_col},
                       {"end_line", d.span.end_line},
                       {"end_col", d.span.end_col},
                       {"start", d.span.start},
                       {"end", d.span.end},
                       {"code", markup::slice(doc, d.span)}});
    }
    return out.dump();
}

std::optional<std::set<std::string>> rule_filter(const std::optional<std::vector<std::string>>& rules) {
    if (!rules) return std::nullopt;
    return std::set<std::string>(rules->begin(), rules->end());
}

std::vector<rules::Diagnostic> lint(const markup::SourceDocument& doc,
                                    const std::optional<std::vector<std::string>>& rules) {
    const auto tree = markup::parse_document(doc);
    if (auto enabled = rule_filter(rules)) return rules::run_rules(tree, doc, *enabled);
    return rules::run_rules(tree, doc);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Native core of a11y-forge";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<FormatError>(m, "FormatError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    m.def(
        "scan_text",
        [](const std::string& text, const std::string& path, const std::optional<std::vector<std::string>>& rules) {
            const auto flavor = markup::flavor_for_path(path);
            const auto doc = markup::SourceDocument::from_text(path, text, flavor);
            return diagnostics_json(doc, lint(doc, rules));
        },
        py::arg("text"), py::arg("path"), py::arg("rules") = py::none());

    m.def(
        "scan_file",
        [](const std::string& path, const std::optional<std::vector<std::string>>& rules) {
            const auto doc = markup::SourceDocument::load(path);
            return diagnostics_json(doc, lint(doc, rules));
        },
        py::arg("path"), py::arg("rules") = py::none());

    m.def("rule_ids", [] { return rules::all_rule_ids(); });

    m.def("parse_toml", [](const std::string& text) { return config::parse_toml(text).dump(); }, py::arg("text"));

    m.def(
        "render_config",
        [](const std::string& text, const std::filesystem::path& base_dir) {
            return config::render_config(config::parse_config(text, base_dir));
        },
        py::arg("text"), py::arg("base_dir"));

    m.def(
        "parse_response",
        [](const std::string& raw, const std::string& schema) {
            llm::SchemaId id;
            if (schema == "findings") {
                id = llm::SchemaId::Findings;
            } else if (schema == "fixes") {
                id = llm::SchemaId::Fixes;
            } else if (schema == "chain_fixes") {
                id = llm::SchemaId::ChainFixes;
            } else {
                throw ConfigError("unknown schema '" + schema + "'");
            }
            const auto r = llm::parse_structured(raw, id);
            llm::Json out{{"ok", r.ok}, {"list_shaped", r.list_shaped}, {"readable", r.readable}};
            out["value"] = r.ok ? r.value : llm::Json(nullptr);
            if (r.stage) out["stage"] = std::string(llm::to_string(*r.stage));
            return out.dump();
        },
        py::arg("raw"), py::arg("schema"));

    m.def("strip_annotation", [](const std::string& text) { return workflows::strip_annotation(text); },
          py::arg("text"));

    m.def(
        "evaluate_corpus",
        [](const std::filesystem::path& corpus_dir, const std::filesystem::path& out_dir, unsigned jobs) {
            const auto corpus = eval::load_corpus(corpus_dir);
            std::vector<std::filesystem::path> fixtures;
            for (const auto& c : corpus) fixtures.push_back(c.dir / "fixtures");
            llm::ReplayProvider replay(fixtures);
            eval::EvalOptions options;
            options.jobs = jobs;
            py::gil_scoped_release release;
            const auto summary = eval::evaluate_corpus(corpus, replay, options);
            eval::write_results(summary, out_dir);
            return summary.summary_text();
        },
        py::arg("corpus_dir"), py::arg("out_dir"), py::arg("jobs") = 0);
}
