#include <fstream>

#include "a11y/errors.hpp"
#include "a11y/workflows.hpp"
#include "internal.hpp"

namespace a11y::workflows {

namespace fs = std::filesystem;

namespace {

std::vector<llm::Record> object_records(const llm::ParseResult& parse) {
    std::vector<llm::Record> out;
    for (const auto& r : parse.records) {
        if (r.is_object) out.push_back(r);
    }
    return out;
}

// A fix is tied to a reported error through its description or its
// offending code.
std::vector<std::size_t> orphan_fixes(const std::vector<llm::FixSuggestion>& fixes,
                                      const std::vector<llm::DetectionFinding>& errors) {
    std::vector<std::size_t> orphans;
    for (std::size_t i = 0; i < fixes.size(); ++i) {
        const auto desc = normalize_whitespace(fixes[i].error_description);
        const auto code = normalize_whitespace(fixes[i].offending_code);
        bool tied = false;
        for (const auto& e : errors) {
            if ((!desc.empty() && desc == normalize_whitespace(e.error_description)) ||
                (!code.empty() && code == normalize_whitespace(e.offending_code))) {
                tied = true;
                break;
            }
        }
        if (!tied) orphans.push_back(i);
    }
    return orphans;
}

void stamp(ReportMetadata& meta, const llm::LlmExchange& exchange) {
    meta.model = exchange.model;
    meta.timestamp = exchange.timestamp;
}

}  // namespace

CheckAndFixResult run_check_and_fix(const markup::SourceDocument& doc, const markup::Span& selection,
                                    llm::Provider& provider, const WorkflowOptions& options, std::stop_token stop) {
    if (selection.start >= selection.end || selection.end > doc.text().size()) {
        throw PreconditionError("selection must be a non-empty range inside " + doc.path());
    }
    const auto span = doc.span(selection.start, selection.end);
    const auto code = markup::slice(doc, span);
    if (detail::code_points(code) > options.prompt_char_budget) {
        throw BudgetError("selection is " + std::to_string(detail::code_points(code)) +
                          " characters, over the budget of " + std::to_string(options.prompt_char_budget));
    }
    const auto detect_prompt = llm::build_detect_prompt(options.templates, code);
    detail::InFlightGuard guard(doc.path());

    CheckAndFixResult result;
    auto& report = result.report;
    report.code_section = code;
    report.metadata.document = detail::file_name(doc);
    report.metadata.selection = span;
    report.metadata.dedupe = options.dedupe;

    auto finish = [&]() -> CheckAndFixResult& {
        if (!options.write_files) return result;
        result.report_path = report_path_for(doc, options);
        if (result.report_path.has_parent_path()) fs::create_directories(result.report_path.parent_path());
        std::ofstream out(result.report_path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + result.report_path.string());
        out << render_report(report);
        return result;
    };

    auto detect = llm::complete(provider, llm::TemplateId::DetectPrompt, detect_prompt, options.params, stop,
                                options.sink, options.retry);
    result.detect_parse = llm::parse_structured(detect.raw_response, llm::SchemaId::Findings);
    detect.parsed = result.detect_parse;
    stamp(report.metadata, detect);
    result.exchanges.push_back(detect);

    if (!result.detect_parse.ok || !result.detect_parse.list_shaped) {
        report.status = ReportStatus::DetectFailed;
        report.raw_detect_response = detect.raw_response;
        return finish();
    }

    auto records = object_records(result.detect_parse);
    const auto findings = result.detect_parse.findings();
    if (options.dedupe) {
        result.dedupe = dedupe_findings(findings);
        std::vector<llm::Record> kept;
        for (auto i : result.dedupe.kept_indices) kept.push_back(records[i]);
        records = std::move(kept);
    } else {
        result.dedupe.unique = findings;
        for (std::size_t i = 0; i < findings.size(); ++i) result.dedupe.kept_indices.push_back(i);
    }
    report.errors_section = result.dedupe.unique;
    report.metadata.duplicates_removed = result.dedupe.duplicates_removed;

    if (records.empty()) return finish();

    const auto chain_prompt = llm::build_chain_fix_prompt(options.templates, code, records);
    llm::LlmExchange chain;
    try {
        chain = llm::complete(provider, llm::TemplateId::ChainFixPrompt, chain_prompt, options.params, stop,
                              options.sink, options.retry);
    } catch (const CancelledError&) {
        report.status = ReportStatus::Cancelled;
        return finish();
    }
    result.chain_parse = llm::parse_structured(chain.raw_response, llm::SchemaId::ChainFixes);
    chain.parsed = result.chain_parse;
    stamp(report.metadata, chain);
    result.exchanges.push_back(chain);

    if (!result.chain_parse->ok || !result.chain_parse->list_shaped) {
        report.status = ReportStatus::ChainFailed;
        report.raw_chain_response = chain.raw_response;
        return finish();
    }
    report.fixes_section = result.chain_parse->fixes();
    report.metadata.orphan_fixes = orphan_fixes(report.fixes_section, report.errors_section);
    return finish();
}

}  // namespace a11y::workflows
