#include <iostream>

#include "a11y/errors.hpp"
#include "a11y/lsp.hpp"

namespace a11y::lsp {

namespace {

// JSON-RPC and protocol error codes.
constexpr int kParseError = -32700;
constexpr int kInvalidRequest = -32600;
constexpr int kMethodNotFound = -32601;
constexpr int kInvalidParams = -32602;
constexpr int kInternalError = -32603;
constexpr int kServerNotInitialized = -32002;
constexpr int kRequestFailed = -32803;
constexpr int kRequestCancelled = -32800;

constexpr int kMessageError = 1;
constexpr int kMessageInfo = 3;

std::optional<markup::Flavor> flavor_of(const std::string& path, const std::string& language) {
    if (auto f = markup::flavor_for_path(path)) return f;
    if (language == "html") return markup::Flavor::Html;
    if (language == "javascriptreact" || language == "javascript") return markup::Flavor::Jsx;
    if (language == "typescriptreact") return markup::Flavor::Tsx;
    return std::nullopt;
}

Json diagnostic_json(const markup::SourceDocument& doc, const rules::Diagnostic& d) {
    Json j{{"range", range_json(doc, d.span.start, d.span.end)},
           {"severity", d.severity == rules::Severity::Error ? 1 : 2},
           {"code", d.wcag_criterion},
           {"source", "a11y-forge"},
           {"message", d.message + " (" + d.rule_id + ")"},
           {"data", {{"rule_id", d.rule_id}, {"criterion", d.wcag_criterion}}}};
    if (const auto* rule = rules::find_rule(d.rule_id); rule && !rule->doc_url.empty()) {
        j["codeDescription"] = {{"href", std::string(rule->doc_url)}};
    }
    return j;
}

markup::Span probe_span(const markup::SourceDocument& doc, std::pair<std::size_t, std::size_t> range) {
    return doc.span(range.first, range.second);
}

}  // namespace

Server::Server(config::EngineConfig config) : config_(std::move(config)) {
    try {
        owned_provider_ = config_.make_provider();
        provider_ = owned_provider_.get();
    } catch (const Error& e) {
        provider_error_ = e.what();
    }
    try {
        workflow_ = config_.workflow_options();
    } catch (const Error& e) {
        workflow_error_ = e.what();
    }
    debouncer_ = std::jthread([this](std::stop_token stop) { debounce_loop(stop); });
}

Server::Server(config::EngineConfig config, llm::Provider& provider) : config_(std::move(config)), provider_(&provider) {
    try {
        workflow_ = config_.workflow_options();
    } catch (const Error& e) {
        workflow_error_ = e.what();
    }
    debouncer_ = std::jthread([this](std::stop_token stop) { debounce_loop(stop); });
}

Server::~Server() {
    {
        std::lock_guard lock(mutex_);
        for (auto& [uri, s] : sessions_) {
            if (s.in_flight_stop) s.in_flight_stop->request_stop();
        }
    }
    debouncer_.request_stop();
    debouncer_ = {};
    workers_.clear();
}

// ---- output ------------------------------------------------------------------------

void Server::set_writer(Writer writer) {
    std::lock_guard lock(write_mutex_);
    writer_ = std::move(writer);
}

void Server::send(const Json& message) {
    std::lock_guard lock(write_mutex_);
    if (writer_) writer_(message);
}

Json Server::result_message(const Json& id, Json result) {
    return {{"jsonrpc", "2.0"}, {"id", id}, {"result", std::move(result)}};
}

Json Server::error_message(const Json& id, int code, const std::string& message) {
    return {{"jsonrpc", "2.0"}, {"id", id}, {"error", {{"code", code}, {"message", message}}}};
}

void Server::respond(const Json& id, Json result) { send(result_message(id, std::move(result))); }

void Server::respond_error(const Json& id, int code, const std::string& message) {
    send(error_message(id, code, message));
}

void Server::notify(const std::string& method, Json params) {
    send({{"jsonrpc", "2.0"}, {"method", method}, {"params", std::move(params)}});
}

void Server::show_message(int type, const std::string& text) {
    notify("window/showMessage", {{"type", type}, {"message", text}});
}

// ---- dispatch ----------------------------------------------------------------------

bool Server::run(std::istream& in, std::ostream& out) {
    set_writer([&out](const Json& m) { write_message(out, m); });
    bool clean = false;
    while (true) {
        std::optional<std::string> body;
        try {
            body = read_message(in);
        } catch (const FormatError& e) {
            std::cerr << "a11y-forge: " << e.what() << "\n";
            break;
        }
        if (!body) break;
        auto message = Json::parse(*body, nullptr, false);
        if (message.is_discarded() || !message.is_object()) {
            respond_error(nullptr, kParseError, "message is not a JSON object");
            continue;
        }
        if (!handle(message)) {
            std::lock_guard lock(mutex_);
            clean = shutdown_;
            break;
        }
    }
    {
        std::lock_guard lock(mutex_);
        for (auto& [uri, s] : sessions_) {
            if (s.in_flight_stop) s.in_flight_stop->request_stop();
        }
    }
    wait_idle();
    set_writer(nullptr);
    return clean;
}

bool Server::handle(const Json& message) {
    if (!message.contains("method")) return true;  // a reply to one of our requests
    const auto method = message.at("method").get<std::string>();
    const Json params = message.value("params", Json::object());
    if (method == "exit") return false;
    if (message.contains("id")) {
        on_request(message.at("id"), method, params);
    } else {
        on_notification(method, params);
    }
    return true;
}

void Server::on_request(const Json& id, const std::string& method, const Json& params) {
    {
        std::lock_guard lock(mutex_);
        if (!initialized_ && method != "initialize") {
            respond_error(id, kServerNotInitialized, "the server has not been initialized");
            return;
        }
        if (shutdown_) {
            respond_error(id, kInvalidRequest, "the server is shutting down");
            return;
        }
    }
    try {
        if (method == "initialize") {
            {
                std::lock_guard lock(mutex_);
                initialized_ = true;
            }
            respond(id, {{"capabilities",
                          {{"textDocumentSync", {{"openClose", true}, {"change", 2}}},
                           {"codeActionProvider", {{"codeActionKinds", {"quickfix", "refactor.rewrite"}}}},
                           {"executeCommandProvider",
                            {{"commands", {std::string(kFixCommand), std::string(kCheckCommand)}}}}}},
                         {"serverInfo", {{"name", "a11y-forge"}, {"version", "0.3.0"}}}});
        } else if (method == "shutdown") {
            // Running commands finish and answer before the shutdown reply.
            wait_idle();
            {
                std::lock_guard lock(mutex_);
                shutdown_ = true;
            }
            respond(id, nullptr);
        } else if (method == "textDocument/codeAction") {
            respond(id, code_actions(params));
        } else if (method == "workspace/executeCommand") {
            execute_command(id, params);
        } else {
            respond_error(id, kMethodNotFound, "unsupported method " + method);
        }
    } catch (const Json::exception& e) {
        respond_error(id, kInvalidParams, e.what());
    } catch (const Error& e) {
        respond_error(id, kInternalError, e.what());
    }
}

void Server::on_notification(const std::string& method, const Json& params) {
    try {
        if (method == "textDocument/didOpen") {
            did_open(params);
        } else if (method == "textDocument/didChange") {
            did_change(params);
        } else if (method == "textDocument/didClose") {
            did_close(params);
        } else if (method == "$/cancelRequest") {
            cancel_request(params);
        }
    } catch (const std::exception& e) {
        show_message(kMessageError, std::string("a11y-forge: ") + e.what());
    }
}

// ---- documents ----------------------------------------------------------------------

markup::SourceDocument Server::snapshot(const Session& s) const {
    const auto flavor = flavor_of(s.path, s.language);
    if (!flavor) throw ConfigError("unsupported document " + s.path);
    return markup::SourceDocument::from_text(s.path, s.text, flavor);
}

void Server::did_open(const Json& params) {
    const auto& td = params.at("textDocument");
    const auto uri = td.at("uri").get<std::string>();
    std::int64_t version = 0;
    {
        std::lock_guard lock(mutex_);
        Session s;
        s.uri = uri;
        s.path = uri_to_path(uri);
        s.language = td.value("languageId", "");
        s.text = td.at("text").get<std::string>();
        s.version = td.value("version", 0);
        version = s.version;
        sessions_[uri] = std::move(s);
        ++running_diagnostics_;
    }
    publish_diagnostics(uri, version);
    std::lock_guard lock(mutex_);
    --running_diagnostics_;
    idle_cv_.notify_all();
}

void Server::did_change(const Json& params) {
    const auto& td = params.at("textDocument");
    const auto uri = td.at("uri").get<std::string>();
    std::int64_t version = 0;
    {
        std::lock_guard lock(mutex_);
        auto it = sessions_.find(uri);
        if (it == sessions_.end()) throw PreconditionError("change for a document that is not open: " + uri);
        auto& s = it->second;
        for (const auto& change : params.at("contentChanges")) s.text = apply_change(s.text, s.path, change);
        s.version = td.value("version", s.version + 1);
        version = s.version;
        // The in-flight result would describe text that no longer exists.
        if (s.in_flight_stop) s.in_flight_stop->request_stop();
        if (config_.debounce.count() > 0) {
            pending_[uri] = std::chrono::steady_clock::now() + config_.debounce;
            debounce_cv_.notify_all();
            return;
        }
        ++running_diagnostics_;
    }
    publish_diagnostics(uri, version);
    std::lock_guard lock(mutex_);
    --running_diagnostics_;
    idle_cv_.notify_all();
}

void Server::did_close(const Json& params) {
    const auto uri = params.at("textDocument").at("uri").get<std::string>();
    {
        std::lock_guard lock(mutex_);
        auto it = sessions_.find(uri);
        if (it == sessions_.end()) return;
        if (it->second.in_flight_stop) it->second.in_flight_stop->request_stop();
        sessions_.erase(it);
        pending_.erase(uri);
        idle_cv_.notify_all();
    }
    notify("textDocument/publishDiagnostics", {{"uri", uri}, {"diagnostics", Json::array()}});
}

void Server::cancel_request(const Json& params) {
    const auto& id = params.at("id");
    std::lock_guard lock(mutex_);
    for (auto& [uri, s] : sessions_) {
        if (s.in_flight_id && *s.in_flight_id == id && s.in_flight_stop) s.in_flight_stop->request_stop();
    }
}

void Server::publish_diagnostics(const std::string& uri, std::int64_t version) {
    Session copy;
    {
        std::lock_guard lock(mutex_);
        auto it = sessions_.find(uri);
        if (it == sessions_.end() || it->second.version != version) return;
        copy.path = it->second.path;
        copy.language = it->second.language;
        copy.text = it->second.text;
    }
    ++recomputes_;
    std::vector<rules::Diagnostic> diagnostics;
    auto published = Json::array();
    try {
        const auto doc = snapshot(copy);
        const auto tree = markup::parse_document(doc);
        diagnostics = rules::run_rules(tree, doc, config_.rules());
        for (const auto& d : diagnostics) published.push_back(diagnostic_json(doc, d));
        for (const auto& w : tree.warnings) {
            published.push_back({{"range", range_json(doc, w.span.start, w.span.end)},
                                 {"severity", 4},
                                 {"source", "a11y-forge"},
                                 {"message", w.message}});
        }
    } catch (const Error&) {
        // Unsupported or undecodable text has nothing to report.
    }
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(uri);
    if (it == sessions_.end() || it->second.version != version) return;  // superseded
    it->second.diagnostics = std::move(diagnostics);
    it->second.diagnostics_version = version;
    notify("textDocument/publishDiagnostics", {{"uri", uri}, {"version", version}, {"diagnostics", published}});
}

void Server::debounce_loop(std::stop_token stop) {
    std::unique_lock lock(mutex_);
    while (!stop.stop_requested()) {
        if (pending_.empty()) {
            debounce_cv_.wait(lock, stop, [&] { return !pending_.empty(); });
            continue;
        }
        auto next = pending_.begin();
        for (auto it = pending_.begin(); it != pending_.end(); ++it) {
            if (it->second < next->second) next = it;
        }
        if (std::chrono::steady_clock::now() < next->second) {
            const auto deadline = next->second;
            debounce_cv_.wait_until(lock, stop, deadline, [] { return false; });
            continue;
        }
        const auto uri = next->first;
        pending_.erase(next);
        auto session = sessions_.find(uri);
        if (session == sessions_.end()) continue;
        const auto version = session->second.version;
        ++running_diagnostics_;
        lock.unlock();
        publish_diagnostics(uri, version);
        lock.lock();
        --running_diagnostics_;
        idle_cv_.notify_all();
    }
}

void Server::wait_idle() {
    std::unique_lock lock(mutex_);
    idle_cv_.wait(lock, [&] { return pending_.empty() && running_diagnostics_ == 0 && running_commands_ == 0; });
}

// ---- actions and commands --------------------------------------------------------

Json Server::code_actions(const Json& params) {
    const auto uri = params.at("textDocument").at("uri").get<std::string>();
    auto actions = Json::array();
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(uri);
    if (it == sessions_.end() || it->second.diagnostics_version != it->second.version) return actions;
    const auto doc = snapshot(it->second);
    const auto range = range_offsets(doc, params.at("range"));
    const auto probe = probe_span(doc, range);
    auto covered = Json::array();
    for (const auto& d : it->second.diagnostics) {
        if (d.span.overlaps(probe)) covered.push_back(diagnostic_json(doc, d));
    }
    const Json argument{{"uri", uri}, {"range", params.at("range")}};
    if (!covered.empty()) {
        actions.push_back({{"title", std::string(kFixActionTitle)},
                           {"kind", "quickfix"},
                           {"diagnostics", covered},
                           {"command",
                            {{"title", std::string(kFixActionTitle)},
                             {"command", std::string(kFixCommand)},
                             {"arguments", Json::array({argument})}}}});
    }
    if (range.first < range.second) {
        actions.push_back({{"title", std::string(kCheckActionTitle)},
                           {"kind", "refactor.rewrite"},
                           {"command",
                            {{"title", std::string(kCheckActionTitle)},
                             {"command", std::string(kCheckCommand)},
                             {"arguments", Json::array({argument})}}}});
    }
    return actions;
}

void Server::execute_command(const Json& id, const Json& params) {
    const auto command = params.at("command").get<std::string>();
    if (command != kFixCommand && command != kCheckCommand) {
        respond_error(id, kInvalidParams, "unknown command " + command);
        return;
    }
    const auto& args = params.value("arguments", Json::array());
    if (args.empty() || !args[0].is_object()) {
        respond_error(id, kInvalidParams, command + " needs {uri, range}");
        return;
    }
    const auto uri = args[0].at("uri").get<std::string>();
    if (!provider_) {
        respond_error(id, kRequestFailed, "no model provider: " + provider_error_);
        return;
    }
    if (!workflow_) {
        respond_error(id, kRequestFailed, workflow_error_);
        return;
    }

    std::lock_guard lock(mutex_);
    auto it = sessions_.find(uri);
    if (it == sessions_.end()) {
        respond_error(id, kInvalidParams, "document is not open: " + uri);
        return;
    }
    auto& session = it->second;
    if (session.in_flight_id) {
        respond_error(id, kRequestFailed, "request already in flight for " + session.path);
        return;
    }
    auto doc = std::make_shared<markup::SourceDocument>(snapshot(session));
    const auto range = range_offsets(*doc, args[0].at("range"));

    if (command == kCheckCommand) {
        if (range.first == range.second) {
            respond_error(id, kInvalidParams, "the selection is empty");
            return;
        }
        const auto selection = doc->span(range.first, range.second);
        launch(id, session,
               [this, id, doc, selection](std::stop_token stop) { return run_check(id, *doc, selection, stop); });
        return;
    }

    const auto probe = probe_span(*doc, range);
    std::vector<rules::Diagnostic> diagnostics;
    if (session.diagnostics_version == session.version) {
        for (const auto& d : session.diagnostics) {
            if (d.span.overlaps(probe)) diagnostics.push_back(d);
        }
    }
    if (diagnostics.empty()) {
        respond_error(id, kInvalidParams, "no diagnostics in the requested range");
        return;
    }
    launch(id, session, [this, id, uri, doc, diagnostics](std::stop_token stop) {
        return run_fix(id, uri, *doc, diagnostics, stop);
    });
}

void Server::launch(const Json& id, Session& session, std::function<Json(std::stop_token)> work) {
    session.in_flight_id = id;
    session.in_flight_stop = std::make_shared<std::stop_source>();
    ++running_commands_;
    workers_.emplace_back([this, uri = session.uri, stop = session.in_flight_stop->get_token(), work = std::move(work)] {
        const auto reply = work(stop);
        finish_command(uri, reply);
    });
}

Json Server::run_fix(const Json& id, const std::string& uri, const markup::SourceDocument& doc,
                     std::vector<rules::Diagnostic> diagnostics, std::stop_token stop) {
    try {
        auto options = *workflow_;
        options.write_files = true;
        options.insert_annotation = false;
        const auto result = workflows::run_fix_with_ai(doc, diagnostics, *provider_, options, stop);
        const auto sidecar = result.sidecar_path.string();
        if (!result.ok()) {
            show_message(kMessageError,
                         "The model response could not be parsed. The raw response is in " + sidecar);
            return result_message(id, {{"edit", nullptr}, {"sidecar", sidecar}});
        }
        const auto at = result.insertion.offset;
        const Json edit{
            {"changes", {{uri, Json::array({{{"range", range_json(doc, at, at)}, {"newText", result.insertion.text}}})}}}};
        show_message(kMessageInfo, "Fix suggestions written to " + sidecar);
        return result_message(id, {{"edit", edit}, {"sidecar", sidecar}, {"annotationId", result.annotation_id}});
    } catch (const std::exception& e) {
        return fail_command(id, e);
    }
}

Json Server::run_check(const Json& id, const markup::SourceDocument& doc, markup::Span selection,
                       std::stop_token stop) {
    try {
        auto options = *workflow_;
        options.write_files = true;
        const auto result = workflows::run_check_and_fix(doc, selection, *provider_, options, stop);
        if (result.report.status == workflows::ReportStatus::Cancelled) throw CancelledError();
        const auto report = result.report_path.string();
        show_message(kMessageInfo, "Accessibility report written to " + report);
        return result_message(id,
                              {{"report", report}, {"status", std::string(workflows::to_string(result.report.status))}});
    } catch (const std::exception& e) {
        return fail_command(id, e);
    }
}

Json Server::fail_command(const Json& id, const std::exception& e) {
    if (dynamic_cast<const CancelledError*>(&e)) return error_message(id, kRequestCancelled, e.what());
    show_message(kMessageError, std::string("a11y-forge: ") + e.what());
    const bool params_problem =
        dynamic_cast<const PreconditionError*>(&e) != nullptr || dynamic_cast<const BudgetError*>(&e) != nullptr;
    return error_message(id, params_problem ? kInvalidParams : kRequestFailed, e.what());
}

// The document is free again before the reply goes out, and the command
// counts as running until it has.
void Server::finish_command(const std::string& uri, const Json& reply) {
    {
        std::lock_guard lock(mutex_);
        if (auto it = sessions_.find(uri); it != sessions_.end()) {
            it->second.in_flight_id.reset();
            it->second.in_flight_stop.reset();
        }
    }
    send(reply);
    std::lock_guard lock(mutex_);
    --running_commands_;
    idle_cv_.notify_all();
}

}  // namespace a11y::lsp
