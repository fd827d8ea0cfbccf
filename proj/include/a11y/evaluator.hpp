#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "a11y/llm.hpp"
#include "a11y/markup.hpp"
#include "a11y/workflows.hpp"

namespace a11y::eval {

enum class Level { Incorrect, PartialOk, CorrectOk, NotApplicable };
enum class Classification { Correct, PartiallyCorrect, Incorrect };
enum class UseCase { FixWithAI, CheckAndFixWithAI };

std::string_view to_string(Level level);
std::string_view to_string(Classification c);
std::string_view to_string(UseCase u);
// Accepts "fix"/"FixWithAI" and "check"/"CheckAndFixWithAI"; anything else
// is a ConfigError.
UseCase use_case_from_string(std::string_view name);

struct SeededError {
    std::string rule_id;
    std::string criterion;
    markup::Span offending_span;
    std::string canonical_offending_code;
};

struct CorpusCase {
    std::string id;
    markup::SourceDocument doc;
    markup::Span selection;
    std::vector<SeededError> seeded_errors;
    bool clean = false;
    std::filesystem::path dir;

    // Reads `<dir>/case.json` and its input file. Throws ConfigError when
    // the case breaks its invariants.
    static CorpusCase load(const std::filesystem::path& dir);
};

// Every case directory under `<root>/cases` (or `root` itself), sorted by name.
std::vector<CorpusCase> load_corpus(const std::filesystem::path& root);

struct CriterionResult {
    std::string criterion_id;
    Level level = Level::NotApplicable;
    std::string detail;
    std::optional<double> measured;
};

struct Verdict {
    Classification classification;
    std::vector<CriterionResult> criteria;
    UseCase use_case;
};

// What a workflow run produced, as seen by the rubric.
struct Response {
    std::optional<llm::ParseResult> detection;  // CheckAndFixWithAI first stage
    std::optional<llm::ParseResult> fixes;      // fix stage, when it ran
    markup::Span code_span;                     // the code the model was shown
};

Response response_of(const workflows::FixWithAiResult& result);
Response response_of(const workflows::CheckAndFixResult& result);

// Pairing of reported items with seeded errors.
struct Match {
    std::size_t item;
    std::size_t seed;
    bool criterion_agrees;
};

struct MatchOutcome {
    std::vector<Match> matches;
    std::vector<std::size_t> excluded_duplicates;  // items never eligible
};

// Maximum matching, then maximum criterion agreement. An item may pair with
// a seed when its whitespace-normalized offending code lies inside the
// seed's code or contains it, or when the criteria agree and the located code
// overlaps the seed's span.
MatchOutcome match_findings(const std::vector<llm::DetectionFinding>& items, const CorpusCase& c,
                            bool exclude_duplicates);

// Locates `needle` in the document inside `within`, treating any whitespace
// run as equal to any other.
std::optional<markup::Span> locate(const markup::SourceDocument& doc, const markup::Span& within,
                                   std::string_view needle);

// Ratio thresholds, exact at the boundaries.
Level recall_level(std::size_t matched, std::size_t total);
Level relevance_level(std::size_t matched, std::size_t total);

std::vector<CriterionResult> check_criteria(const Response& response, const CorpusCase& c, UseCase use_case);

// Any Incorrect wins; otherwise Correct when strictly more than half of the
// applicable criteria are CorrectOk. Throws EvaluationError when nothing is
// applicable.
Verdict classify(std::vector<CriterionResult> criteria, UseCase use_case);

// ---- corpus runs ---------------------------------------------------------------

struct EvalOptions {
    std::vector<UseCase> use_cases{UseCase::CheckAndFixWithAI, UseCase::FixWithAI};
    workflows::WorkflowOptions workflow;
    unsigned jobs = 0;  // 0 picks the hardware concurrency
};

enum class RunStatus { Evaluated, Skipped, Errored };
std::string_view to_string(RunStatus status);

struct CaseOutcome {
    std::string case_id;
    UseCase use_case;
    RunStatus status = RunStatus::Evaluated;
    std::optional<Verdict> verdict;
    std::string note;
};

struct EvalSummary {
    std::vector<CaseOutcome> outcomes;  // in corpus order, use cases in option order

    std::size_t count(UseCase u, Classification c) const;
    std::size_t count(UseCase u, RunStatus s) const;
    llm::Json results_json() const;
    std::string summary_text() const;
};

// Throws PreconditionError for an empty corpus. Provider failures mark the
// case as errored and the run continues.
EvalSummary evaluate_corpus(const std::vector<CorpusCase>& corpus, llm::Provider& provider, const EvalOptions& options);

// Writes results.json and summary.txt into `dir`.
void write_results(const EvalSummary& summary, const std::filesystem::path& dir);

}  // namespace a11y::eval
