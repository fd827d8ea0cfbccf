#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "a11y/errors.hpp"
#include "a11y/evaluator.hpp"
#include "scripted.hpp"
#include "thresholds.hpp"

using namespace a11y;
using namespace a11y::eval;
using namespace a11y::testkit;
namespace fs = std::filesystem;

namespace {

const fs::path kCases = fs::path(A11Y_CORPUS_DIR) / "cases";

workflows::WorkflowOptions quiet() {
    workflows::WorkflowOptions o;
    o.write_files = false;
    return o;
}

const CriterionResult& criterion(const Verdict& v, std::string_view id) {
    for (const auto& c : v.criteria) {
        if (c.criterion_id == id) return c;
    }
    throw std::out_of_range(std::string(id));
}

std::vector<CriterionResult> levels(std::initializer_list<Level> ls) {
    std::vector<CriterionResult> out;
    for (auto l : ls) out.push_back({"c" + std::to_string(out.size()), l, {}, {}});
    return out;
}

int rank(Classification c) {
    switch (c) {
        case Classification::Incorrect: return 0;
        case Classification::PartiallyCorrect: return 1;
        case Classification::Correct: return 2;
    }
    return -1;
}

}  // namespace

// ---- thresholds ---------------------------------------------------------------------

TEST(Thresholds, BruteForceAgainstOracle) {
    std::size_t checked = 0;
    for (std::size_t t = 1; t <= 200; ++t) {
        for (std::size_t m = 0; m <= t; ++m) {
            ASSERT_EQ(recall_level(m, t), recall_oracle(m, t)) << m << "/" << t;
            ASSERT_EQ(relevance_level(m, t), relevance_oracle(m, t)) << m << "/" << t;
            ++checked;
        }
    }
    EXPECT_EQ(checked, 20300u);
    EXPECT_EQ(recall_level(0, 0), Level::NotApplicable);
    EXPECT_EQ(relevance_level(0, 0), Level::NotApplicable);
}

TEST(Thresholds, HundredSeedSyntheticCase) {
    const auto c = synthetic_case(100);
    const std::vector<std::pair<std::size_t, std::pair<Level, Level>>> table{
        {49, {Level::Incorrect, Level::Incorrect}},  {50, {Level::Incorrect, Level::PartialOk}},
        {65, {Level::PartialOk, Level::PartialOk}},  {80, {Level::PartialOk, Level::PartialOk}},
        {85, {Level::CorrectOk, Level::CorrectOk}},
    };
    for (const auto& [m, expected] : table) {
        EXPECT_EQ(level_for(c, m, 0, "detection-recall"), expected.first) << "recall " << m;
        EXPECT_EQ(level_for(c, m, 100 - m, "relevance-ratio"), expected.second) << "relevance " << m;
    }
}

// ---- classification -------------------------------------------------------------

TEST(Classify, MajorityRule) {
    using L = Level;
    const auto C = L::CorrectOk, P = L::PartialOk;
    EXPECT_EQ(classify(levels({C, C, C, C, C, P, P, P, P}), UseCase::FixWithAI).classification,
              Classification::Correct);
    EXPECT_EQ(classify(levels({C, C, C, C, P, P, P, P, P}), UseCase::FixWithAI).classification,
              Classification::PartiallyCorrect);
    EXPECT_EQ(classify(levels({C, C, C, P, P, P}), UseCase::FixWithAI).classification,
              Classification::PartiallyCorrect);
    EXPECT_EQ(classify(levels({C, C, C, C, C, C, C, C, L::Incorrect}), UseCase::FixWithAI).classification,
              Classification::Incorrect);
    EXPECT_EQ(classify(levels({C, L::NotApplicable, L::NotApplicable}), UseCase::FixWithAI).classification,
              Classification::Correct);
    EXPECT_THROW(classify(levels({L::NotApplicable, L::NotApplicable}), UseCase::FixWithAI), EvaluationError);
}

TEST(Classify, MonotoneAndOrderFree) {
    std::mt19937_64 rng(7);
    const Level all[] = {Level::Incorrect, Level::PartialOk, Level::CorrectOk, Level::NotApplicable};
    for (int round = 0; round < 2000; ++round) {
        std::vector<CriterionResult> cs;
        const auto n = 1 + rng() % 12;
        for (std::size_t i = 0; i < n; ++i) cs.push_back({"c" + std::to_string(i), all[rng() % 4], {}, {}});
        cs.push_back({"anchor", Level::PartialOk, {}, {}});
        const auto base = classify(cs, UseCase::CheckAndFixWithAI).classification;

        auto shuffled = cs;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        ASSERT_EQ(classify(shuffled, UseCase::CheckAndFixWithAI).classification, base);

        auto improved = cs;
        auto& pick = improved[rng() % improved.size()];
        if (pick.level == Level::Incorrect) pick.level = Level::PartialOk;
        else if (pick.level == Level::PartialOk) pick.level = Level::CorrectOk;
        ASSERT_GE(rank(classify(improved, UseCase::CheckAndFixWithAI).classification), rank(base));
    }
}

TEST(Classify, Names) {
    EXPECT_EQ(use_case_from_string("fix"), UseCase::FixWithAI);
    EXPECT_EQ(use_case_from_string("CheckAndFixWithAI"), UseCase::CheckAndFixWithAI);
    EXPECT_THROW(use_case_from_string("both"), ConfigError);
    EXPECT_EQ(to_string(Classification::PartiallyCorrect), "PartiallyCorrect");
}

// ---- criteria on real responses ----------------------------------------------

TEST(Rubric, TooltipCheckAndFixIsIncorrect) {
    const auto c = CorpusCase::load(kCases / "01-tooltip");
    auto provider = testkit::scripted_provider(c.dir);
    const auto result = workflows::run_check_and_fix(c.doc, c.selection, provider, quiet());
    const auto v = classify(check_criteria(response_of(result), c, UseCase::CheckAndFixWithAI),
                            UseCase::CheckAndFixWithAI);
    EXPECT_EQ(v.classification, Classification::Incorrect);
    EXPECT_EQ(criterion(v, "detection-recall").level, Level::Incorrect);
    EXPECT_DOUBLE_EQ(*criterion(v, "detection-recall").measured, 2.0 / 5.0);
    EXPECT_EQ(criterion(v, "relevance-ratio").level, Level::PartialOk);
    EXPECT_DOUBLE_EQ(*criterion(v, "relevance-ratio").measured, 2.0 / 4.0);
    EXPECT_EQ(criterion(v, "duplicate-free").level, Level::PartialOk);
    EXPECT_EQ(criterion(v, "no-new-a11y-issues").level, Level::Incorrect);
    EXPECT_EQ(criterion(v, "json-valid").level, Level::CorrectOk);
    EXPECT_EQ(criterion(v, "contextual-relevance").level, Level::NotApplicable);
}

TEST(Rubric, TooltipFixWithAiIsCorrect) {
    const auto c = CorpusCase::load(kCases / "01-tooltip");
    auto provider = testkit::scripted_provider(c.dir);
    const auto tree = markup::parse_document(c.doc);
    const auto result = workflows::run_fix_with_ai(c.doc, rules::run_rules(tree, c.doc), provider, quiet());
    const auto v = classify(check_criteria(response_of(result), c, UseCase::FixWithAI), UseCase::FixWithAI);
    EXPECT_EQ(v.classification, Classification::Correct);
    std::size_t correct = 0;
    for (const auto& r : v.criteria) {
        EXPECT_NE(r.level, Level::Incorrect) << r.criterion_id << ": " << r.detail;
        correct += r.level == Level::CorrectOk;
    }
    EXPECT_GE(correct, 5u);
    EXPECT_THROW(criterion(v, "detection-recall"), std::out_of_range);
}

TEST(Rubric, GroundTruthDetectionIsCorrect) {
    for (const auto& c : load_corpus(A11Y_CORPUS_DIR)) {
        // Seeds sharing code and criterion would be merged as duplicates.
        bool ambiguous = false;
        for (std::size_t i = 0; i < c.seeded_errors.size(); ++i) {
            for (std::size_t k = 0; k < i; ++k) {
                ambiguous = ambiguous || (c.seeded_errors[i].criterion == c.seeded_errors[k].criterion &&
                                          c.seeded_errors[i].offending_span == c.seeded_errors[k].offending_span);
            }
        }
        if (ambiguous) continue;
        auto list = llm::Json::array();
        for (const auto& s : c.seeded_errors) {
            list.push_back({{"error_description", "Finding " + std::to_string(list.size()) + " about " + s.rule_id},
                            {"offending_code", s.canonical_offending_code},
                            {"criterion", s.criterion}});
        }
        Response r{llm::parse_structured(list.dump(), llm::SchemaId::Findings), std::nullopt, c.selection};
        const auto v = classify(check_criteria(r, c, UseCase::CheckAndFixWithAI), UseCase::CheckAndFixWithAI);
        EXPECT_EQ(v.classification, Classification::Correct) << c.id;
    }
}

TEST(Rubric, UnparseableAndReadableResponses) {
    const auto c = CorpusCase::load(kCases / "01-tooltip");
    Response verbose{llm::parse_structured(std::string(400, 'a') + " words", llm::SchemaId::Findings), std::nullopt,
                     c.selection};
    const auto v1 = classify(check_criteria(verbose, c, UseCase::CheckAndFixWithAI), UseCase::CheckAndFixWithAI);
    EXPECT_EQ(v1.classification, Classification::Incorrect);
    EXPECT_EQ(criterion(v1, "detection-recall").level, Level::NotApplicable);

    Response readable{llm::parse_structured("error_description: The div is not focusable\n"
                                            "offending_code: <div onClick={f}>\ncriterion: 2.1.1\n",
                                            llm::SchemaId::Findings),
                      std::nullopt, c.selection};
    ASSERT_TRUE(readable.detection->readable);
    const auto v2 = classify(check_criteria(readable, c, UseCase::CheckAndFixWithAI), UseCase::CheckAndFixWithAI);
    EXPECT_EQ(criterion(v2, "json-valid").level, Level::PartialOk);
    EXPECT_EQ(v2.classification, Classification::PartiallyCorrect);
}

TEST(Rubric, FencedJsonIsPartial) {
    const auto c = CorpusCase::load(kCases / "01-tooltip");
    Response r{llm::parse_structured("```json\n[]\n```", llm::SchemaId::Findings), std::nullopt, c.selection};
    EXPECT_EQ(check_criteria(r, c, UseCase::CheckAndFixWithAI).front().level, Level::PartialOk);
}

TEST(Rubric, CleanCaseWithFindingsIsMisidentified) {
    const auto c = CorpusCase::load(kCases / "03-img-with-alt-clean");
    ASSERT_TRUE(c.clean);
    Response r{llm::parse_structured(
                   R"([{"error_description":"x","offending_code":"<img","criterion":"1.1.1"}])",
                   llm::SchemaId::Findings),
               std::nullopt, c.selection};
    const auto v = classify(check_criteria(r, c, UseCase::CheckAndFixWithAI), UseCase::CheckAndFixWithAI);
    EXPECT_EQ(criterion(v, "misidentify-clean").level, Level::Incorrect);
    EXPECT_EQ(v.classification, Classification::Incorrect);
}

TEST(Matching, LocateIgnoresWhitespaceRuns) {
    const auto doc = markup::SourceDocument::from_text("a.jsx", "<div\n   className=\"x\"   onClick={f}>");
    const auto span = locate(doc, doc.span(0, doc.text().size()), "<div className=\"x\" onClick={f}>");
    ASSERT_TRUE(span);
    EXPECT_EQ(span->start, 0u);
    EXPECT_EQ(span->end, doc.text().size());
    EXPECT_FALSE(locate(doc, doc.span(0, doc.text().size()), "<span>"));
}

TEST(Matching, OneItemPerSeed) {
    const auto c = synthetic_case(3);
    std::vector<llm::DetectionFinding> items;
    for (int k = 0; k < 3; ++k) items.push_back({"same " + std::to_string(k), c.seeded_errors[0].canonical_offending_code, "4.1.2"});
    items.push_back({"other", c.seeded_errors[2].canonical_offending_code, "2.1.1"});
    const auto m = match_findings(items, c, false);
    ASSERT_EQ(m.matches.size(), 2u);
    EXPECT_EQ(m.matches[0].seed, 0u);
    EXPECT_EQ(m.matches[1].item, 3u);
    EXPECT_FALSE(m.matches[1].criterion_agrees);
    EXPECT_EQ(match_findings(items, c, true).excluded_duplicates, (std::vector<std::size_t>{1, 2}));
}

// ---- corpus runs ------------------------------------------------------------------

TEST(Corpus, LoadsThirtyValidCases) {
    const auto corpus = load_corpus(A11Y_CORPUS_DIR);
    ASSERT_EQ(corpus.size(), 30u);
    EXPECT_EQ(corpus.front().id, "01-tooltip");
    EXPECT_TRUE(std::is_sorted(corpus.begin(), corpus.end(),
                               [](const CorpusCase& a, const CorpusCase& b) { return a.id < b.id; }));
}

TEST(Corpus, EmptyCorpusIsRejected) {
    llm::ScriptedProvider p([](const llm::CompletionRequest&) { return std::string("[]"); });
    EXPECT_THROW(evaluate_corpus({}, p, {}), PreconditionError);
}

TEST(Corpus, OutputKeepsCorpusOrderAcrossJobCounts) {
    const auto corpus = load_corpus(A11Y_CORPUS_DIR);
    std::vector<CorpusCase> three;
    for (std::size_t i = 0; i < 3; ++i) three.push_back(CorpusCase::load(corpus[i].dir));
    // Each case answers from its own script, chosen by the prompt text.
    llm::ScriptedProvider p([&](const llm::CompletionRequest& r) {
        for (const auto& c : three) {
            const auto stem = fs::path(c.doc.path()).filename().string();
            const auto code = markup::slice(c.doc, c.selection);
            if (r.prompt.find(code.substr(0, std::min<std::size_t>(code.size(), 80))) == std::string::npos) continue;
            const auto script = c.dir / "script";
            switch (r.template_id) {
                case llm::TemplateId::DetectPrompt: return testkit::read_file(script / "detect.txt");
                case llm::TemplateId::ChainFixPrompt: return testkit::read_file(script / "chain_fix.txt");
                case llm::TemplateId::FixPrompt: return testkit::read_file(script / "fix.txt");
            }
            (void)stem;
        }
        return std::string("[]");
    });
    EvalOptions one;
    one.jobs = 1;
    EvalOptions many;
    many.jobs = 8;
    const auto a = evaluate_corpus(three, p, one);
    const auto b = evaluate_corpus(three, p, many);
    EXPECT_EQ(a.results_json().dump(), b.results_json().dump());
    EXPECT_EQ(a.summary_text(), b.summary_text());
    ASSERT_EQ(a.outcomes.size(), 6u);
    EXPECT_EQ(a.outcomes[0].case_id, "01-tooltip");
    EXPECT_EQ(a.outcomes[1].use_case, UseCase::FixWithAI);
    EXPECT_EQ(a.outcomes[5].status, RunStatus::Skipped);
}

TEST(Corpus, ProviderFailureMarksCaseErrored) {
    std::vector<CorpusCase> one;
    one.push_back(CorpusCase::load(kCases / "02-html-img-missing-alt"));
    llm::ScriptedProvider p([](const llm::CompletionRequest&) -> std::string { throw TransportError("down"); });
    EvalOptions o;
    o.workflow.retry.max_retries = 0;
    const auto s = evaluate_corpus(one, p, o);
    ASSERT_EQ(s.outcomes.size(), 2u);
    EXPECT_EQ(s.outcomes[0].status, RunStatus::Errored);
    EXPECT_EQ(s.count(UseCase::CheckAndFixWithAI, RunStatus::Errored), 1u);
    EXPECT_NE(s.outcomes[0].note.find("down"), std::string::npos);
}
