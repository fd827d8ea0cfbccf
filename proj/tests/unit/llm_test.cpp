#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include <unistd.h>

#include "a11y/errors.hpp"
#include "a11y/llm.hpp"

using namespace a11y;
using namespace a11y::llm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("a11y_llm_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

class Echo : public Provider {
public:
    std::string name() const override { return "echo"; }
    CompletionResponse generate(const CompletionRequest& r, std::stop_token) override {
        ++calls;
        return {"[]", r.params.model, "2024-01-01T00:00:00Z"};
    }
    std::atomic<int> calls{0};
};

struct CollectingSink : ExchangeSink {
    void record(const LlmExchange& e) override { seen.push_back(e); }
    std::vector<LlmExchange> seen;
};

rules::Diagnostic diag(std::string rule, std::string criterion) {
    rules::Diagnostic d;
    d.rule_id = std::move(rule);
    d.wcag_criterion = std::move(criterion);
    d.message = "m";
    return d;
}

}  // namespace

// ---- templates --------------------------------------------------------------

TEST(Templates, DefaultsCarryRoleAndSchema) {
    const auto set = TemplateSet::defaults();
    const auto& fix = set.get(TemplateId::FixPrompt);
    EXPECT_NE(fix.system_role.find("accessibility"), std::string::npos);
    EXPECT_EQ(fix.placeholders(), (std::set<std::string>{"code", "diagnostics"}));
    EXPECT_EQ(set.get(TemplateId::DetectPrompt).output_schema, SchemaId::Findings);
    EXPECT_EQ(set.get(TemplateId::ChainFixPrompt).placeholders(), (std::set<std::string>{"code", "findings"}));
}

TEST(Templates, MissingSeparatorIsTemplateError) {
    EXPECT_THROW(PromptTemplate::parse(TemplateId::DetectPrompt, "role only {code}"), TemplateError);
}

TEST(Templates, MissingRequiredPlaceholderIsTemplateError) {
    EXPECT_THROW(PromptTemplate::parse(TemplateId::FixPrompt, "role\n---\nonly {code}"), TemplateError);
}

TEST(Templates, RenderWithoutValueIsTemplateError) {
    auto tpl = PromptTemplate::parse(TemplateId::DetectPrompt, "role\n---\n{code}");
    EXPECT_THROW(tpl.render({}), TemplateError);
}

TEST(Templates, SubstitutionIsSinglePass) {
    auto tpl = PromptTemplate::parse(TemplateId::ChainFixPrompt, "role\n---\nA {code} B {findings} {other}");
    const auto out = tpl.render({{"code", "{findings}"}, {"findings", "F"}});
    EXPECT_EQ(out, "role\n\nA {findings} B F {other}");
}

TEST(Templates, DetectPromptIsInjectiveInCode) {
    const auto set = TemplateSet::defaults();
    std::mt19937 rng(7);
    std::set<std::string> prompts;
    std::set<std::string> codes;
    const std::string alphabet = "<>{}/ \n\tabcXYZ=\"'";
    for (int i = 0; i < 500; ++i) {
        std::string code = "x";
        const auto len = rng() % 20;
        for (unsigned j = 0; j < len; ++j) code += alphabet[rng() % alphabet.size()];
        if (!codes.insert(code).second) continue;
        EXPECT_TRUE(prompts.insert(build_detect_prompt(set, code)).second) << code;
    }
}

TEST(Templates, OverrideFromFile) {
    const auto dir = scratch("tpl");
    {
        std::ofstream(dir / "d.prompt") << "custom role\n---\nCheck: {code}\n";
    }
    auto set = TemplateSet::defaults();
    set.override_from_file(TemplateId::DetectPrompt, dir / "d.prompt");
    EXPECT_EQ(build_detect_prompt(set, "<a/>"), "custom role\n\nCheck: <a/>\n");
    EXPECT_THROW(set.override_from_file(TemplateId::DetectPrompt, dir / "missing"), ConfigError);
}

TEST(Prompts, Preconditions) {
    const auto set = TemplateSet::defaults();
    EXPECT_THROW(build_fix_prompt(set, "<div/>", {}), PreconditionError);
    EXPECT_THROW(build_detect_prompt(set, " \n\t"), PreconditionError);
    const auto p = build_fix_prompt(set, "<div onClick={f}/>", {diag("click-events-have-key-events", "2.1.1")});
    EXPECT_NE(p.find("<div onClick={f}/>"), std::string::npos);
    EXPECT_NE(p.find("\"criterion\": \"2.1.1\""), std::string::npos);
}

TEST(Prompts, ChainPromptReproducesRawRecords) {
    const auto parsed = parse_structured(R"([{"descrizione_errore":"e","criterio":"2.1.1","x":1}])", SchemaId::Findings);
    const auto p = build_chain_fix_prompt(TemplateSet::defaults(), "<div/>", parsed.records);
    EXPECT_NE(p.find("\"descrizione_errore\": \"e\""), std::string::npos);
    EXPECT_NE(p.find("\"x\": 1"), std::string::npos);
}

// ---- structured output ------------------------------------------------------

TEST(Structured, WholeText) {
    auto r = parse_structured(R"([{"error_description":"a","offending_code":"<b/>","criterion":"1.1.1"}])",
                              SchemaId::Findings);
    ASSERT_TRUE(r.ok);
    EXPECT_EQ(r.stage, ParseStage::WholeText);
    ASSERT_EQ(r.findings().size(), 1u);
    EXPECT_EQ(r.findings()[0].criterion, "1.1.1");
}

TEST(Structured, FencedBlock) {
    auto r = parse_structured("Sure!\n```json\n[{\"error_description\":\"a\"}]\n```\nBye", SchemaId::Findings);
    ASSERT_TRUE(r.ok);
    EXPECT_EQ(r.stage, ParseStage::Unfenced);
}

TEST(Structured, ProseAroundJson) {
    auto r = parse_structured("Here [see below] are the issues: [{\"error_description\":\"a]\"}] done.",
                              SchemaId::Findings);
    ASSERT_TRUE(r.ok);
    EXPECT_EQ(r.stage, ParseStage::BalancedScan);
    EXPECT_EQ(r.findings()[0].error_description, "a]");
}

TEST(Structured, ItalianKeysNormalize) {
    auto r = parse_structured(
        R"([{"Descrizione_Errore":"d","codice_generatore":"c","descrizione_risoluzione":"f","codice_fix":"x"}])",
        SchemaId::Fixes);
    ASSERT_TRUE(r.ok);
    const auto fixes = r.fixes();
    ASSERT_EQ(fixes.size(), 1u);
    EXPECT_EQ(fixes[0].error_description, "d");
    EXPECT_EQ(fixes[0].offending_code, "c");
    EXPECT_EQ(fixes[0].fix_description, "f");
    EXPECT_EQ(fixes[0].fixed_code, "x");
    EXPECT_TRUE(r.records[0].extra_fields.empty());
}

TEST(Structured, ExtraFieldsAreKept) {
    auto r = parse_structured(R"([{"error_description":"d","severity":"high"}])", SchemaId::Findings);
    ASSERT_TRUE(r.ok);
    EXPECT_EQ(r.records[0].extra_fields, std::vector<std::string>{"severity"});
}

TEST(Structured, SingleArrayMemberIsUnwrapped) {
    auto r = parse_structured(R"({"errors":[{"error_description":"d"}]})", SchemaId::Findings);
    ASSERT_TRUE(r.ok);
    EXPECT_TRUE(r.list_shaped);
    EXPECT_EQ(r.records.size(), 1u);
}

TEST(Structured, ReadableFallback) {
    const std::string text =
        "error_description: the div has a click handler\noffending_code: <div onClick>\ncriterion: 2.1.1\n";
    auto r = parse_structured(text, SchemaId::Findings);
    EXPECT_FALSE(r.ok);
    EXPECT_TRUE(r.readable);
    EXPECT_EQ(r.attempts.size(), 3u);
}

TEST(Structured, VerboseTextIsNotReadable) {
    std::string text = "error_description: x\noffending_code: y\ncriterion: z\n";
    text += std::string(4000, 'w');
    EXPECT_FALSE(parse_structured(text, SchemaId::Findings).readable);
    EXPECT_FALSE(parse_structured("I could not find anything.", SchemaId::Findings).readable);
}

TEST(Structured, NeverThrows) {
    std::mt19937 rng(11);
    const std::string alphabet = "[]{}\"\\:,` \nabc01";
    for (int i = 0; i < 2000; ++i) {
        std::string s;
        const auto len = rng() % 60;
        for (unsigned j = 0; j < len; ++j) s += alphabet[rng() % alphabet.size()];
        EXPECT_NO_THROW(parse_structured(s, SchemaId::ChainFixes));
    }
}

TEST(Structured, Idempotent) {
    const auto first = parse_structured("x ```\n[{\"error_description\":\"q\"}]\n``` y", SchemaId::Findings);
    ASSERT_TRUE(first.ok);
    const auto again = parse_structured(first.value.dump(), SchemaId::Findings);
    EXPECT_EQ(again.value, first.value);
    EXPECT_EQ(again.records, first.records);
}

// ---- providers --------------------------------------------------------------

TEST(Replay, KeyIsTemplateNulPrompt) {
    // sha256 of "detect\0abc" computed independently.
    EXPECT_EQ(replay_key(TemplateId::DetectPrompt, "abc"), sha256_hex(std::string("detect\0abc", 10)));
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_NE(replay_key(TemplateId::DetectPrompt, "abc"), replay_key(TemplateId::FixPrompt, "abc"));
}

TEST(Replay, ServesRecordedFixture) {
    const auto dir = scratch("replay");
    write_fixture(dir, TemplateId::DetectPrompt, "prompt", "[1]", "codellama:7b", "2024-05-01T10:00:00Z");
    ReplayProvider replay(dir);
    auto r = replay.generate({TemplateId::DetectPrompt, "prompt", {}}, {});
    EXPECT_EQ(r.text, "[1]");
    EXPECT_EQ(r.model, "codellama:7b");
    EXPECT_EQ(r.timestamp, "2024-05-01T10:00:00Z");
}

TEST(Replay, MissNamesTheKey) {
    ReplayProvider replay(scratch("miss"));
    try {
        replay.generate({TemplateId::FixPrompt, "nothing", {}}, {});
        FAIL();
    } catch (const FixtureNotFound& e) {
        EXPECT_EQ(e.key(), replay_key(TemplateId::FixPrompt, "nothing"));
        EXPECT_NE(std::string(e.what()).find(e.key()), std::string::npos);
    }
}

TEST(Replay, RecordingRoundTrip) {
    const auto dir = scratch("rec");
    ScriptedProvider scripted([](const CompletionRequest& r) { return "answer to " + r.prompt; });
    RecordingProvider recorder(scripted, dir);
    recorder.generate({TemplateId::DetectPrompt, "q", {}}, {});
    ReplayProvider replay(dir);
    EXPECT_EQ(replay.generate({TemplateId::DetectPrompt, "q", {}}, {}).text, "answer to q");
}

TEST(Live, RequestBody) {
    CompletionParams params;
    params.model = "codellama";
    params.max_tokens = 128;
    const auto body = LiveProvider::request_body({TemplateId::DetectPrompt, "hi", params});
    EXPECT_EQ(body["model"], "codellama");
    EXPECT_EQ(body["prompt"], "hi");
    EXPECT_EQ(body["stream"], false);
    EXPECT_EQ(body["options"]["temperature"], 0.0);
    EXPECT_EQ(body["options"]["seed"], 42);
    EXPECT_EQ(body["options"]["num_predict"], 128);
}

TEST(Live, UnreachableEndpointIsTransportError) {
    LiveProvider live({"http://127.0.0.1:9", std::chrono::milliseconds(500)});
    EXPECT_THROW(live.generate({TemplateId::DetectPrompt, "hi", {}}, {}), TransportError);
}

// ---- retries and cancellation ----------------------------------------------

TEST(Exchange, RetriesTimeoutsThenSucceeds) {
    Echo echo;
    using F = FaultInjectingProvider;
    F faulty(echo, {{F::Fault::Timeout}, {F::Fault::Timeout}});
    CollectingSink sink;
    RetryPolicy fast{2, std::chrono::milliseconds(1), 2.0};
    auto ex = complete(faulty, TemplateId::DetectPrompt, "p", {}, {}, &sink, fast);
    EXPECT_EQ(ex.attempts, 3);
    EXPECT_EQ(ex.status, ExchangeStatus::Completed);
    EXPECT_EQ(faulty.calls(), 3);
    ASSERT_EQ(sink.seen.size(), 1u);
}

TEST(Exchange, GivesUpAfterTwoRetries) {
    Echo echo;
    using F = FaultInjectingProvider;
    F faulty(echo, {{F::Fault::Timeout}, {F::Fault::Timeout}, {F::Fault::Timeout}});
    CollectingSink sink;
    RetryPolicy fast{2, std::chrono::milliseconds(1), 2.0};
    EXPECT_THROW(complete(faulty, TemplateId::DetectPrompt, "p", {}, {}, &sink, fast), TransportError);
    EXPECT_EQ(echo.calls, 0);
    ASSERT_EQ(sink.seen.size(), 1u);
    EXPECT_EQ(sink.seen[0].status, ExchangeStatus::Failed);
}

TEST(Exchange, HttpErrorsAreNotRetried) {
    Echo echo;
    using F = FaultInjectingProvider;
    F faulty(echo, {{F::Fault::HttpError, 500, "boom"}});
    try {
        complete(faulty, TemplateId::DetectPrompt, "p", {});
        FAIL();
    } catch (const ProviderError& e) {
        EXPECT_EQ(e.status(), 500);
        EXPECT_EQ(e.body(), "boom");
    }
    EXPECT_EQ(faulty.calls(), 1);
}

TEST(Exchange, CancelStopsAHangingCall) {
    Echo echo;
    using F = FaultInjectingProvider;
    F faulty(echo, {{F::Fault::Hang}});
    CollectingSink sink;
    std::stop_source source;
    std::thread canceller([&] {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        source.request_stop();
    });
    const auto started = std::chrono::steady_clock::now();
    EXPECT_THROW(complete(faulty, TemplateId::DetectPrompt, "p", {}, source.get_token(), &sink), CancelledError);
    canceller.join();
    EXPECT_LT(std::chrono::steady_clock::now() - started, std::chrono::seconds(2));
    ASSERT_EQ(sink.seen.size(), 1u);
    EXPECT_EQ(sink.seen[0].status, ExchangeStatus::Cancelled);
}

TEST(Exchange, JsonlLogAppends) {
    const auto dir = scratch("log");
    JsonlExchangeLog log(dir / "x.jsonl");
    Echo echo;
    complete(echo, TemplateId::DetectPrompt, "p1", {}, {}, &log);
    complete(echo, TemplateId::DetectPrompt, "p2", {}, {}, &log);
    std::ifstream in(dir / "x.jsonl");
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        auto j = Json::parse(line);
        EXPECT_EQ(j["status"], "completed");
        ++n;
    }
    EXPECT_EQ(n, 2);
}
