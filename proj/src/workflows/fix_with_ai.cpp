#include <fstream>

#include "a11y/errors.hpp"
#include "a11y/workflows.hpp"
#include "internal.hpp"

namespace a11y::workflows {

namespace fs = std::filesystem;

markup::Span flagged_span(const markup::SourceDocument& doc, const markup::ElementTree& tree,
                          const std::vector<rules::Diagnostic>& diagnostics) {
    std::optional<std::size_t> start;
    std::size_t end = 0;
    for (const auto& d : diagnostics) {
        markup::Span covered = d.span;
        markup::walk(tree, [&](const markup::ElementNode& el, const auto&) {
            // Parents come first, so the last hit is the innermost element.
            if (el.open_tag_span.contains(d.span) || el.span == d.span) covered = el.span;
        });
        start = start ? std::min(*start, covered.start) : covered.start;
        end = std::max(end, covered.end);
    }
    return doc.span(start.value_or(0), end);
}

FixWithAiResult run_fix_with_ai(const markup::SourceDocument& doc, const std::vector<rules::Diagnostic>& diagnostics,
                                llm::Provider& provider, const WorkflowOptions& options, std::stop_token stop) {
    if (diagnostics.empty()) throw PreconditionError("FixWithAI needs at least one diagnostic");
    for (const auto& d : diagnostics) {
        if (d.span.start > d.span.end || d.span.end > doc.text().size()) {
            throw PreconditionError("diagnostic " + d.rule_id + " lies outside " + doc.path());
        }
    }
    detail::InFlightGuard guard(doc.path());

    FixWithAiResult result;
    result.diagnostics = diagnostics;
    const auto tree = markup::parse_document(doc);
    result.source_span = flagged_span(doc, tree, diagnostics);
    result.code = markup::slice(doc, result.source_span);
    if (detail::code_points(result.code) > options.prompt_char_budget) {
        throw BudgetError("flagged code is " + std::to_string(detail::code_points(result.code)) +
                          " characters, over the budget of " + std::to_string(options.prompt_char_budget));
    }

    const auto prompt = llm::build_fix_prompt(options.templates, result.code, diagnostics);
    result.exchange =
        llm::complete(provider, llm::TemplateId::FixPrompt, prompt, options.params, stop, options.sink, options.retry);
    result.parse = llm::parse_structured(result.exchange.raw_response, llm::SchemaId::Fixes);
    result.exchange.parsed = result.parse;

    if (result.ok()) {
        result.suggestions = result.parse.fixes();
        result.annotation_id = llm::sha256_hex(result.exchange.raw_response).substr(0, 8);
        const auto where = plan_annotation(doc.text(), result.source_span.start, result.source_span.end, {},
                                           result.annotation_id, doc.flavor());
        result.insertion = plan_annotation(doc.text(), result.source_span.start, result.source_span.end,
                                           result.suggestions, result.annotation_id,
                                           comment_style_at(tree, doc.flavor(), where.offset));
        result.annotation_text = result.insertion.text;
        result.annotated_text = apply_insertion(doc.text(), result.insertion);
    } else {
        result.insertion = {result.source_span.end, {}};
        result.annotated_text = doc.text();
    }

    if (options.write_files) {
        result.sidecar_path = sidecar_path_for(doc, options);
        if (result.sidecar_path.has_parent_path()) fs::create_directories(result.sidecar_path.parent_path());
        std::ofstream out(result.sidecar_path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + result.sidecar_path.string());
        out << render_sidecar(doc, result);
        if (options.insert_annotation && result.ok()) {
            std::ofstream src(doc.path(), std::ios::binary | std::ios::trunc);
            if (!src) throw IoError("cannot write " + doc.path());
            src << result.annotated_text;
        }
    }
    return result;
}

}  // namespace a11y::workflows
