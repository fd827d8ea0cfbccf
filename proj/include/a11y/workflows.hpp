#pragma once

#include <filesystem>
#include <optional>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "a11y/llm.hpp"
#include "a11y/markup.hpp"
#include "a11y/rules.hpp"

namespace a11y::workflows {

struct WorkflowOptions {
    llm::CompletionParams params;
    llm::TemplateSet templates = llm::TemplateSet::defaults();
    llm::RetryPolicy retry;
    llm::ExchangeSink* sink = nullptr;
    bool dedupe = true;
    // Sidecar and report files go here; next to the source when unset.
    std::optional<std::filesystem::path> output_dir;
    std::size_t prompt_char_budget = 24000;
    bool write_files = true;
    // FixWithAI only: also write the annotated text back to the source.
    bool insert_annotation = false;
};

// ---- dedupe -------------------------------------------------------------------

inline constexpr double kJaccardThreshold = 0.8;

std::string normalize_whitespace(std::string_view text);
// Jaccard index of the lowercase alphanumeric token sets; 0 when both are
// empty.
double token_jaccard(std::string_view a, std::string_view b);

// Equal criteria and either the same offending code (whitespace-normalized)
// or error descriptions with token Jaccard >= 0.8. `score` receives 1.0 for a
// code match, otherwise the Jaccard index.
bool are_duplicates(const llm::DetectionFinding& a, const llm::DetectionFinding& b, double* score = nullptr);

struct Merge {
    std::size_t kept;
    std::size_t dropped;
    double score;
};

struct DedupeOutcome {
    std::vector<llm::DetectionFinding> unique;
    std::vector<std::size_t> kept_indices;  // positions of `unique` in the input
    std::size_t duplicates_removed = 0;
    std::vector<Merge> merge_log;
};

// First occurrence wins; order is otherwise preserved.
DedupeOutcome dedupe_findings(const std::vector<llm::DetectionFinding>& findings);

// ---- annotations ----------------------------------------------------------------

struct Insertion {
    std::size_t offset = 0;
    std::string text;
};

// How the annotation block is commented out: `//` lines in script code,
// one `<!-- -->` comment in HTML, and one `{/* */}` container between JSX
// children, where `//` would be rendered as text.
enum class CommentStyle { Line, HtmlBlock, JsxBlock };

// Style for a block inserted at `offset`. The flavor-only overloads below
// use Line for JSX/TSX and HtmlBlock for HTML.
CommentStyle comment_style_at(const markup::ElementTree& tree, markup::Flavor flavor, std::size_t offset);

// Comment-framed block listing the suggestions, indented with `indent`.
std::string render_annotation(const std::vector<llm::FixSuggestion>& suggestions, std::string_view id,
                              CommentStyle style, std::string_view indent);
std::string render_annotation(const std::vector<llm::FixSuggestion>& suggestions, std::string_view id,
                              markup::Flavor flavor, std::string_view indent);

// Where and what to insert so the block lands on the line after the one
// holding `anchor_end`, indented like the line holding `anchor_start`.
Insertion plan_annotation(std::string_view text, std::size_t anchor_start, std::size_t anchor_end,
                          const std::vector<llm::FixSuggestion>& suggestions, std::string_view id,
                          CommentStyle style);
Insertion plan_annotation(std::string_view text, std::size_t anchor_start, std::size_t anchor_end,
                          const std::vector<llm::FixSuggestion>& suggestions, std::string_view id,
                          markup::Flavor flavor);

std::string apply_insertion(std::string_view text, const Insertion& insertion);

// Removes every annotation block. Throws FormatError naming the line of an
// unbalanced marker.
std::string strip_annotation(std::string_view text);

// ---- FixWithAI ----------------------------------------------------------------

struct FixWithAiResult {
    markup::Span source_span;
    std::string code;
    std::vector<rules::Diagnostic> diagnostics;
    std::vector<llm::FixSuggestion> suggestions;
    llm::ParseResult parse;
    std::string annotation_id;
    std::string annotation_text;
    Insertion insertion;     // empty text when the response did not parse
    std::string annotated_text;
    std::filesystem::path sidecar_path;  // empty when files are not written
    llm::LlmExchange exchange;

    bool ok() const { return parse.ok && parse.list_shaped; }
};

// Throws PreconditionError for an empty diagnostic list or spans outside
// the document, BudgetError when the flagged code is over budget, and
// whatever the provider throws.
FixWithAiResult run_fix_with_ai(const markup::SourceDocument& doc, const std::vector<rules::Diagnostic>& diagnostics,
                                llm::Provider& provider, const WorkflowOptions& options, std::stop_token stop = {});

std::string render_sidecar(const markup::SourceDocument& doc, const FixWithAiResult& result);

// ---- CheckAndFixWithAI ----------------------------------------------------------

enum class ReportStatus { Complete, DetectFailed, ChainFailed, Cancelled };
std::string_view to_string(ReportStatus status);

struct ReportMetadata {
    std::string model;
    std::string timestamp;
    std::string document;  // file name of the analyzed document
    markup::Span selection;
    bool dedupe = true;
    std::size_t duplicates_removed = 0;
    std::vector<std::size_t> orphan_fixes;  // 0-based positions in fixes_section

    friend bool operator==(const ReportMetadata&, const ReportMetadata&) = default;
};

struct A11yReport {
    std::string code_section;
    std::vector<llm::DetectionFinding> errors_section;
    std::vector<llm::FixSuggestion> fixes_section;
    ReportMetadata metadata;
    ReportStatus status = ReportStatus::Complete;
    std::optional<std::string> raw_detect_response;
    std::optional<std::string> raw_chain_response;

    friend bool operator==(const A11yReport&, const A11yReport&) = default;
};

std::string render_report(const A11yReport& report);

struct CheckAndFixResult {
    A11yReport report;
    DedupeOutcome dedupe;
    llm::ParseResult detect_parse;
    std::optional<llm::ParseResult> chain_parse;
    std::vector<llm::LlmExchange> exchanges;
    std::filesystem::path report_path;  // empty when files are not written
};

// Never writes to the analyzed document. Throws PreconditionError for an
// empty or out-of-range selection, BudgetError when over budget,
// CancelledError when cancelled before the detect stage completes.
CheckAndFixResult run_check_and_fix(const markup::SourceDocument& doc, const markup::Span& selection,
                                    llm::Provider& provider, const WorkflowOptions& options,
                                    std::stop_token stop = {});

std::filesystem::path sidecar_path_for(const markup::SourceDocument& doc, const WorkflowOptions& options);
std::filesystem::path report_path_for(const markup::SourceDocument& doc, const WorkflowOptions& options);

// The smallest span covering every element a diagnostic points into.
markup::Span flagged_span(const markup::SourceDocument& doc, const markup::ElementTree& tree,
                          const std::vector<rules::Diagnostic>& diagnostics);

}  // namespace a11y::workflows
