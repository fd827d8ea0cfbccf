#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "a11y/rules.hpp"

namespace a11y::llm {

using Json = nlohmann::ordered_json;

// ---- templates --------------------------------------------------------------

enum class TemplateId { FixPrompt, DetectPrompt, ChainFixPrompt };

// Stable names: "fix", "detect", "chain_fix".
std::string_view to_string(TemplateId id);
std::optional<TemplateId> template_from_string(std::string_view name);

enum class SchemaId { Findings, Fixes, ChainFixes };

std::string_view to_string(SchemaId id);

struct PromptTemplate {
    TemplateId id;
    std::string system_role;
    std::string body_template;
    SchemaId output_schema;

    // Splits "<system role>\n---\n<body>". Throws TemplateError when the
    // separator is missing.
    static PromptTemplate parse(TemplateId id, std::string_view text);

    // Placeholder names used in the body, e.g. {"code", "diagnostics"}.
    std::set<std::string> placeholders() const;

    // Single-pass substitution of {code}, {diagnostics} and {findings};
    // braces around anything else are left alone. A placeholder without a
    // value is a TemplateError.
    std::string render(const std::map<std::string, std::string>& values) const;
};

class TemplateSet {
public:
    // The templates compiled into the library.
    static TemplateSet defaults();

    // Replaces one template with the contents of `path`.
    void override_from_file(TemplateId id, const std::filesystem::path& path);
    void set(PromptTemplate tpl);
    const PromptTemplate& get(TemplateId id) const;

private:
    std::map<TemplateId, PromptTemplate> templates_;
};

// ---- records ---------------------------------------------------------------

struct DetectionFinding {
    std::string error_description;
    std::string offending_code;
    std::string criterion;

    friend bool operator==(const DetectionFinding&, const DetectionFinding&) = default;
};

struct FixSuggestion {
    std::string error_description;
    std::string offending_code;
    std::string fix_description;
    std::string fixed_code;
    std::optional<std::string> criterion;

    friend bool operator==(const FixSuggestion&, const FixSuggestion&) = default;
};

// One element of a parsed response list, before it is narrowed to a typed
// record. Field names are normalized to English.
struct Record {
    Json raw;                                  // element exactly as it arrived
    bool is_object = false;
    std::map<std::string, std::string> fields;  // known fields that were present
    std::vector<std::string> extra_fields;      // keys outside the schema

    bool has(std::string_view field) const;
    // Present and not blank.
    bool populated(std::string_view field) const;
    std::string get(std::string_view field) const;

    friend bool operator==(const Record&, const Record&) = default;
};

// Canonical English field name for an English or Italian key, or nullopt.
std::optional<std::string> canonical_field(std::string_view key);

// Fields of a schema: (name, required). Optional fields missing only lower
// the grade.
std::vector<std::pair<std::string, bool>> schema_fields(SchemaId schema);

enum class ParseStage { WholeText, Unfenced, BalancedScan };
std::string_view to_string(ParseStage stage);

struct StageAttempt {
    ParseStage stage;
    bool succeeded = false;
    std::string detail;
};

struct ParseResult {
    bool ok = false;
    std::optional<ParseStage> stage;   // the stage that succeeded
    std::vector<StageAttempt> attempts;
    Json value;                         // the parsed JSON when ok
    bool list_shaped = false;           // value is (or wraps) a list of records
    std::vector<Record> records;
    // Failed parses whose text still lays out every schema field as a
    // "name: value" label, without being overly long.
    bool readable = false;

    std::vector<DetectionFinding> findings() const;
    std::vector<FixSuggestion> fixes() const;

    friend bool operator==(const ParseResult&, const ParseResult&) = default;
};

// Total: never throws. Stages are tried in order: whole text, text inside
// the first markdown fence, first balanced top-level array or object.
ParseResult parse_structured(std::string_view raw, SchemaId schema);

// ---- prompts ---------------------------------------------------------------

// JSON rendering of diagnostics embedded in the fix prompt.
std::string render_diagnostics(const std::vector<rules::Diagnostic>& diagnostics);

// JSON rendering of findings embedded in the chain prompt. When the
// original raw records are available they are reproduced verbatim.
std::string render_findings(const std::vector<DetectionFinding>& findings);
std::string render_records(const std::vector<Record>& records);

// Throws PreconditionError on an empty diagnostic list.
std::string build_fix_prompt(const TemplateSet& templates, std::string_view code,
                             const std::vector<rules::Diagnostic>& diagnostics);
// Throws PreconditionError on empty or whitespace-only code.
std::string build_detect_prompt(const TemplateSet& templates, std::string_view code);
std::string build_chain_fix_prompt(const TemplateSet& templates, std::string_view code,
                                   const std::vector<Record>& findings);
std::string build_chain_fix_prompt(const TemplateSet& templates, std::string_view code,
                                   const std::vector<DetectionFinding>& findings);

// ---- providers ---------------------------------------------------------------

struct CompletionParams {
    std::string model = "codellama";
    double temperature = 0.0;
    std::optional<int> seed = 42;
    int max_tokens = 0;  // 0 leaves the provider default
};

struct CompletionRequest {
    TemplateId template_id;
    std::string prompt;
    CompletionParams params;
};

struct CompletionResponse {
    std::string text;
    std::string model;
    std::string timestamp;  // ISO-8601 UTC; replay returns the recorded value
};

class Provider {
public:
    virtual ~Provider() = default;
    virtual std::string name() const = 0;
    // Throws TransportError, ProviderError, FixtureNotFound or
    // CancelledError. Implementations must be safe for concurrent calls.
    virtual CompletionResponse generate(const CompletionRequest& request, std::stop_token stop) = 0;
};

// Hex SHA-256 of template name, a NUL byte, then the rendered prompt.
std::string replay_key(TemplateId id, std::string_view prompt);
std::string sha256_hex(std::string_view data);

std::string utc_timestamp_now();

// Serves recorded responses from `<dir>/<replay_key>.json`.
class ReplayProvider : public Provider {
public:
    explicit ReplayProvider(std::filesystem::path dir);
    // Looks in each directory in order.
    explicit ReplayProvider(std::vector<std::filesystem::path> dirs);
    std::string name() const override { return "replay"; }
    CompletionResponse generate(const CompletionRequest& request, std::stop_token stop) override;

private:
    std::vector<std::filesystem::path> dirs_;
};

struct LiveOptions {
    std::string endpoint = "http://127.0.0.1:11434";
    std::chrono::milliseconds timeout{120000};
};

// POSTs to `<endpoint>/api/generate` with stream=false.
class LiveProvider : public Provider {
public:
    explicit LiveProvider(LiveOptions options);
    std::string name() const override { return "live"; }
    CompletionResponse generate(const CompletionRequest& request, std::stop_token stop) override;

    // Request body sent for `request`.
    static Json request_body(const CompletionRequest& request);

private:
    LiveOptions options_;
};

// Answers from a fixed queue or a callback. Used for authoring fixtures
// and in tests.
class ScriptedProvider : public Provider {
public:
    using Responder = std::function<std::string(const CompletionRequest&)>;
    explicit ScriptedProvider(Responder responder, std::string timestamp = "1970-01-01T00:00:00Z");
    std::string name() const override { return "scripted"; }
    CompletionResponse generate(const CompletionRequest& request, std::stop_token stop) override;

private:
    Responder responder_;
    std::string timestamp_;
};

// Wraps a provider and writes every successful exchange as a replay
// fixture before returning it.
class RecordingProvider : public Provider {
public:
    RecordingProvider(Provider& inner, std::filesystem::path dir);
    std::string name() const override { return inner_.name(); }
    CompletionResponse generate(const CompletionRequest& request, std::stop_token stop) override;

private:
    Provider& inner_;
    std::filesystem::path dir_;
};

// Test double that fails a scripted number of times before delegating.
class FaultInjectingProvider : public Provider {
public:
    enum class Fault { Timeout, HttpError, Hang };
    struct Step {
        Fault fault;
        int status = 503;
        std::string body;
    };
    FaultInjectingProvider(Provider& inner, std::vector<Step> steps);
    std::string name() const override { return "fault-injecting"; }
    CompletionResponse generate(const CompletionRequest& request, std::stop_token stop) override;
    int calls() const;

private:
    Provider& inner_;
    mutable std::mutex mutex_;
    std::vector<Step> steps_;
    int calls_ = 0;
};

// Writes `<dir>/<replay_key>.json`. Returns the path written.
std::filesystem::path write_fixture(const std::filesystem::path& dir, TemplateId id, std::string_view prompt,
                                    std::string_view response, std::string_view model, std::string_view timestamp);

// ---- exchange ----------------------------------------------------------------

enum class ExchangeStatus { Completed, Failed, Cancelled };
std::string_view to_string(ExchangeStatus status);

struct LlmExchange {
    TemplateId template_id;
    std::string rendered_prompt;
    std::string raw_response;
    std::optional<ParseResult> parsed;
    std::string model;
    std::chrono::milliseconds latency{0};
    std::string timestamp;
    ExchangeStatus status = ExchangeStatus::Completed;
    std::string error;
    int attempts = 0;
};

// Receives every exchange, successful or not, as soon as transport ends.
class ExchangeSink {
public:
    virtual ~ExchangeSink() = default;
    virtual void record(const LlmExchange& exchange) = 0;
};

// Appends exchanges as JSON lines to a file.
class JsonlExchangeLog : public ExchangeSink {
public:
    explicit JsonlExchangeLog(std::filesystem::path path);
    void record(const LlmExchange& exchange) override;

private:
    std::filesystem::path path_;
    std::mutex mutex_;
};

struct RetryPolicy {
    int max_retries = 2;
    std::chrono::milliseconds initial_backoff{250};
    double multiplier = 2.0;
};

// Sends one prompt with retries on TransportError only. The exchange is
// handed to `sink` before this returns or rethrows. Cancellation through
// `stop` throws CancelledError after recording a Cancelled exchange.
LlmExchange complete(Provider& provider, TemplateId id, const std::string& prompt,
                     const CompletionParams& params, std::stop_token stop = {},
                     ExchangeSink* sink = nullptr, const RetryPolicy& retry = {});

}  // namespace a11y::llm
