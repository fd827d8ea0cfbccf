#pragma once

#include <atomic>
#include <condition_variable>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "a11y/config.hpp"
#include "a11y/markup.hpp"
#include "a11y/rules.hpp"
#include "a11y/workflows.hpp"

namespace a11y::lsp {

using Json = llm::Json;

inline constexpr std::string_view kFixCommand = "a11y.fixWithAI";
inline constexpr std::string_view kCheckCommand = "a11y.checkAndFixWithAI";
inline constexpr std::string_view kFixActionTitle = "Get fix suggestion from AI";
inline constexpr std::string_view kCheckActionTitle = "Check and fix accessibility issues with AI";

// ---- framing ---------------------------------------------------------------------

// Reads one Content-Length framed body. Returns nullopt at end of input.
// Throws FormatError for a malformed header.
std::optional<std::string> read_message(std::istream& in);
void write_message(std::ostream& out, const Json& message);

// ---- positions -------------------------------------------------------------------

// Protocol position: 0-based line, 0-based UTF-16 code unit.
struct Position {
    std::uint32_t line = 0;
    std::uint32_t character = 0;

    friend bool operator==(const Position&, const Position&) = default;
};

// A character past the end of its line clamps to the line end, and a line
// past the end clamps to the end of the document.
std::size_t offset_of(const markup::SourceDocument& doc, Position pos);
Position position_of(const markup::SourceDocument& doc, std::size_t offset);
Json range_json(const markup::SourceDocument& doc, std::size_t start, std::size_t end);
// Byte offsets of a protocol range.
std::pair<std::size_t, std::size_t> range_offsets(const markup::SourceDocument& doc, const Json& range);

std::string uri_to_path(std::string_view uri);
std::string path_to_uri(std::string_view path);

// Applies a content change (with or without a range) to `text`.
std::string apply_change(const std::string& text, const std::string& path, const Json& change);

// ---- server ----------------------------------------------------------------------

class Server {
public:
    using Writer = std::function<void(const Json&)>;

    // Uses the provider the configuration describes.
    explicit Server(config::EngineConfig config);
    // Uses `provider`, which must outlive the server.
    Server(config::EngineConfig config, llm::Provider& provider);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    // Reads framed messages until `exit` or end of input. Returns true when
    // `shutdown` came before `exit`.
    bool run(std::istream& in, std::ostream& out);

    // In-process use: every outgoing message goes to `writer`.
    void set_writer(Writer writer);
    // Handles one incoming message. Returns false once `exit` arrived.
    bool handle(const Json& message);
    // Blocks until pending diagnostics and commands have finished.
    void wait_idle();

    // Number of times diagnostics were computed, for debounce checks.
    std::size_t recompute_count() const { return recomputes_.load(); }

private:
    struct Session {
        std::string uri;
        std::string path;
        std::string language;
        std::string text;
        std::int64_t version = 0;
        std::vector<rules::Diagnostic> diagnostics;  // for `diagnostics_version`
        std::int64_t diagnostics_version = -1;
        std::optional<Json> in_flight_id;
        std::shared_ptr<std::stop_source> in_flight_stop;
    };

    void send(const Json& message);
    static Json result_message(const Json& id, Json result);
    static Json error_message(const Json& id, int code, const std::string& message);
    void respond(const Json& id, Json result);
    void respond_error(const Json& id, int code, const std::string& message);
    void notify(const std::string& method, Json params);
    void show_message(int type, const std::string& text);

    void on_request(const Json& id, const std::string& method, const Json& params);
    void on_notification(const std::string& method, const Json& params);

    void did_open(const Json& params);
    void did_change(const Json& params);
    void did_close(const Json& params);
    Json code_actions(const Json& params);
    void execute_command(const Json& id, const Json& params);
    void cancel_request(const Json& params);

    markup::SourceDocument snapshot(const Session& s) const;
    void publish_diagnostics(const std::string& uri, std::int64_t version);
    void debounce_loop(std::stop_token stop);

    void launch(const Json& id, Session& session, std::function<Json(std::stop_token)> work);
    // Workers build their reply; finish_command sends it.
    Json run_fix(const Json& id, const std::string& uri, const markup::SourceDocument& doc,
                 std::vector<rules::Diagnostic> diagnostics, std::stop_token stop);
    Json run_check(const Json& id, const markup::SourceDocument& doc, markup::Span selection, std::stop_token stop);
    Json fail_command(const Json& id, const std::exception& e);
    void finish_command(const std::string& uri, const Json& reply);

    config::EngineConfig config_;
    std::unique_ptr<llm::Provider> owned_provider_;
    llm::Provider* provider_ = nullptr;
    std::string provider_error_;  // why no provider is available
    std::optional<workflows::WorkflowOptions> workflow_;
    std::string workflow_error_;

    std::mutex write_mutex_;
    Writer writer_;

    mutable std::mutex mutex_;
    std::map<std::string, Session> sessions_;
    bool initialized_ = false;
    bool shutdown_ = false;

    std::condition_variable_any debounce_cv_;
    std::map<std::string, std::chrono::steady_clock::time_point> pending_;
    std::size_t running_diagnostics_ = 0;
    std::atomic<std::size_t> recomputes_{0};

    std::condition_variable idle_cv_;
    std::size_t running_commands_ = 0;
    std::vector<std::jthread> workers_;
    std::jthread debouncer_;
};

}  // namespace a11y::lsp
