#include <algorithm>
#include <fstream>
#include <future>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include "a11y/errors.hpp"
#include "a11y/evaluator.hpp"

namespace a11y::eval {

namespace {

const std::vector<std::string>& criterion_order() {
    static const std::vector<std::string> ids{
        "json-valid",        "fields-populated",  "code-integrity",       "no-new-syntax-break",
        "no-new-a11y-issues", "issues-resolved",  "relevance-ratio",      "detection-recall",
        "misidentify-clean", "criterion-valid",   "duplicate-free",       "contextual-relevance",
        "logical-errors"};
    return ids;
}

CaseOutcome run_one(const CorpusCase& c, UseCase use_case, llm::Provider& provider,
                    const workflows::WorkflowOptions& options) {
    CaseOutcome out{c.id, use_case, RunStatus::Evaluated, std::nullopt, {}};
    try {
        if (use_case == UseCase::CheckAndFixWithAI) {
            const auto result = workflows::run_check_and_fix(c.doc, c.selection, provider, options);
            out.verdict = classify(check_criteria(response_of(result), c, use_case), use_case);
            return out;
        }
        const auto tree = markup::parse_document(c.doc);
        std::vector<rules::Diagnostic> diags;
        for (const auto& d : rules::run_rules(tree, c.doc)) {
            if (d.span.overlaps(c.selection)) diags.push_back(d);
        }
        if (diags.empty()) {
            out.status = RunStatus::Skipped;
            out.note = "no diagnostics in selection";
            return out;
        }
        const auto result = workflows::run_fix_with_ai(c.doc, diags, provider, options);
        out.verdict = classify(check_criteria(response_of(result), c, use_case), use_case);
    } catch (const Error& e) {
        out.status = RunStatus::Errored;
        out.verdict.reset();
        out.note = e.what();
    }
    return out;
}

}  // namespace

std::string_view to_string(RunStatus status) {
    switch (status) {
        case RunStatus::Evaluated: return "evaluated";
        case RunStatus::Skipped: return "skipped";
        case RunStatus::Errored: return "errored";
    }
    return "unknown";
}

EvalSummary evaluate_corpus(const std::vector<CorpusCase>& corpus, llm::Provider& provider,
                            const EvalOptions& options) {
    if (corpus.empty()) throw PreconditionError("the corpus has no cases");
    auto workflow = options.workflow;
    workflow.write_files = false;
    workflow.insert_annotation = false;

    unsigned jobs = options.jobs ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::vector<CaseOutcome>> per_case(corpus.size());
    for (std::size_t begin = 0; begin < corpus.size(); begin += jobs) {
        const auto end = std::min(corpus.size(), begin + jobs);
        std::vector<std::future<std::vector<CaseOutcome>>> batch;
        for (std::size_t i = begin; i < end; ++i) {
            batch.push_back(std::async(std::launch::async, [&, i] {
                std::vector<CaseOutcome> outcomes;
                for (auto u : options.use_cases) outcomes.push_back(run_one(corpus[i], u, provider, workflow));
                return outcomes;
            }));
        }
        for (std::size_t i = begin; i < end; ++i) per_case[i] = batch[i - begin].get();
    }

    EvalSummary summary;
    for (auto& outcomes : per_case) {
        for (auto& o : outcomes) summary.outcomes.push_back(std::move(o));
    }
    return summary;
}

std::size_t EvalSummary::count(UseCase u, Classification c) const {
    return static_cast<std::size_t>(std::count_if(outcomes.begin(), outcomes.end(), [&](const CaseOutcome& o) {
        return o.use_case == u && o.verdict && o.verdict->classification == c;
    }));
}

std::size_t EvalSummary::count(UseCase u, RunStatus s) const {
    return static_cast<std::size_t>(std::count_if(
        outcomes.begin(), outcomes.end(), [&](const CaseOutcome& o) { return o.use_case == u && o.status == s; }));
}

llm::Json EvalSummary::results_json() const {
    auto cases = llm::Json::array();
    for (const auto& o : outcomes) {
        llm::Json entry;
        entry["case_id"] = o.case_id;
        entry["use_case"] = std::string(to_string(o.use_case));
        entry["status"] = std::string(to_string(o.status));
        if (o.verdict) entry["classification"] = std::string(to_string(o.verdict->classification));
        if (!o.note.empty()) entry["note"] = o.note;
        auto criteria = llm::Json::array();
        if (o.verdict) {
            for (const auto& c : o.verdict->criteria) {
                llm::Json item;
                item["id"] = c.criterion_id;
                item["level"] = std::string(to_string(c.level));
                if (c.measured) item["measured"] = *c.measured;
                item["detail"] = c.detail;
                criteria.push_back(std::move(item));
            }
        }
        entry["criteria"] = std::move(criteria);
        cases.push_back(std::move(entry));
    }
    llm::Json out;
    out["cases"] = std::move(cases);
    return out;
}

std::string EvalSummary::summary_text() const {
    std::vector<UseCase> used;
    for (const auto& o : outcomes) {
        if (std::find(used.begin(), used.end(), o.use_case) == used.end()) used.push_back(o.use_case);
    }
    std::ostringstream out;
    out << "EVALUATION SUMMARY\n";
    for (auto u : used) {
        out << "\n" << to_string(u) << "\n";
        for (auto c : {Classification::Correct, Classification::PartiallyCorrect, Classification::Incorrect}) {
            out << "  " << std::left << std::setw(18) << to_string(c) << std::right << std::setw(4) << count(u, c)
                << "\n";
        }
        out << "  " << std::left << std::setw(18) << "skipped" << std::right << std::setw(4)
            << count(u, RunStatus::Skipped) << "\n";
        out << "  " << std::left << std::setw(18) << "errored" << std::right << std::setw(4)
            << count(u, RunStatus::Errored) << "\n";

        std::map<std::string, std::map<Level, std::size_t>> levels;
        for (const auto& o : outcomes) {
            if (o.use_case != u || !o.verdict) continue;
            for (const auto& c : o.verdict->criteria) ++levels[c.criterion_id][c.level];
        }
        out << "  " << std::left << std::setw(22) << "criterion" << std::right;
        for (auto l : {Level::CorrectOk, Level::PartialOk, Level::Incorrect, Level::NotApplicable}) {
            out << std::setw(15) << to_string(l);
        }
        out << "\n";
        for (const auto& id : criterion_order()) {
            auto it = levels.find(id);
            if (it == levels.end()) continue;
            out << "  " << std::left << std::setw(22) << id << std::right;
            for (auto l : {Level::CorrectOk, Level::PartialOk, Level::Incorrect, Level::NotApplicable}) {
                out << std::setw(15) << it->second[l];
            }
            out << "\n";
        }
    }
    return out.str();
}

void write_results(const EvalSummary& summary, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write " + (dir / name).string());
        f << content;
    };
    write("results.json", summary.results_json().dump(2) + "\n");
    write("summary.txt", summary.summary_text());
}

}  // namespace a11y::eval
