#include <httplib.h>

#include "a11y/errors.hpp"
#include "a11y/llm.hpp"

namespace a11y::llm {

namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string base;    // path prefix without trailing slash
};

Endpoint split_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint must be an http URL: '" + url + "'");
    if (url.compare(0, scheme_end, "http") != 0) {
        throw ConfigError("only plain http endpoints are supported: '" + url + "'");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    Endpoint e;
    e.origin = url.substr(0, path_start);
    if (path_start != std::string::npos) e.base = url.substr(path_start);
    while (!e.base.empty() && e.base.back() == '/') e.base.pop_back();
    return e;
}

}  // namespace

LiveProvider::LiveProvider(LiveOptions options) : options_(std::move(options)) {
    split_endpoint(options_.endpoint);
}

Json LiveProvider::request_body(const CompletionRequest& request) {
    Json options = {{"temperature", request.params.temperature}};
    if (request.params.seed) options["seed"] = *request.params.seed;
    if (request.params.max_tokens > 0) options["num_predict"] = request.params.max_tokens;
    return {
        {"model", request.params.model},
        {"prompt", request.prompt},
        {"stream", false},
        {"options", options},
    };
}

CompletionResponse LiveProvider::generate(const CompletionRequest& request, std::stop_token stop) {
    if (stop.stop_requested()) throw CancelledError();
    const auto endpoint = split_endpoint(options_.endpoint);
    httplib::Client client(endpoint.origin);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);

    // Cancellation closes the socket, which unblocks the request below.
    std::stop_callback on_stop(stop, [&client] { client.stop(); });
    const auto body = request_body(request).dump(-1, ' ', false, Json::error_handler_t::replace);
    auto result = client.Post(endpoint.base + "/api/generate", body, "application/json");
    if (stop.stop_requested()) throw CancelledError();
    if (!result) {
        throw TransportError("request to " + options_.endpoint + " failed: " + httplib::to_string(result.error()));
    }
    if (result->status < 200 || result->status >= 300) throw ProviderError(result->status, result->body);
    auto reply = Json::parse(result->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("response") || !reply["response"].is_string()) {
        throw ProviderError(result->status, "response body has no 'response' text: " + result->body);
    }
    return {reply["response"].get<std::string>(), reply.value("model", request.params.model), utc_timestamp_now()};
}

}  // namespace a11y::llm
