#include <condition_variable>
#include <fstream>
#include <thread>

#include "a11y/errors.hpp"
#include "a11y/llm.hpp"

namespace a11y::llm {

std::string_view to_string(ExchangeStatus status) {
    switch (status) {
        case ExchangeStatus::Completed: return "completed";
        case ExchangeStatus::Failed: return "failed";
        case ExchangeStatus::Cancelled: return "cancelled";
    }
    return "unknown";
}

JsonlExchangeLog::JsonlExchangeLog(std::filesystem::path path) : path_(std::move(path)) {}

void JsonlExchangeLog::record(const LlmExchange& exchange) {
    Json line = {
        {"template_id", to_string(exchange.template_id)},
        {"status", to_string(exchange.status)},
        {"model", exchange.model},
        {"timestamp", exchange.timestamp},
        {"latency_ms", exchange.latency.count()},
        {"attempts", exchange.attempts},
        {"prompt", exchange.rendered_prompt},
        {"response", exchange.raw_response},
        {"error", exchange.error},
    };
    std::lock_guard lock(mutex_);
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw Error("cannot append to exchange log " + path_.string());
    out << line.dump(-1, ' ', false, Json::error_handler_t::replace) << '\n';
    out.flush();
}

namespace {

// Sleeps for `d` unless `stop` fires first. Returns false when stopped.
bool interruptible_sleep(std::chrono::milliseconds d, std::stop_token stop) {
    std::mutex m;
    std::condition_variable_any cv;
    std::unique_lock lock(m);
    return !cv.wait_for(lock, stop, d, [] { return false; }) && !stop.stop_requested();
}

}  // namespace

LlmExchange complete(Provider& provider, TemplateId id, const std::string& prompt, const CompletionParams& params,
                     std::stop_token stop, ExchangeSink* sink, const RetryPolicy& retry) {
    LlmExchange exchange;
    exchange.template_id = id;
    exchange.rendered_prompt = prompt;
    exchange.model = params.model;
    const auto started = std::chrono::steady_clock::now();

    auto finish = [&](ExchangeStatus status, std::string error) {
        exchange.status = status;
        exchange.error = std::move(error);
        exchange.latency =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
        if (exchange.timestamp.empty() && status != ExchangeStatus::Completed) exchange.timestamp = utc_timestamp_now();
        if (sink) sink->record(exchange);
    };

    auto backoff = retry.initial_backoff;
    for (int attempt = 0;; ++attempt) {
        exchange.attempts = attempt + 1;
        try {
            if (stop.stop_requested()) throw CancelledError();
            auto response = provider.generate({id, prompt, params}, stop);
            exchange.raw_response = std::move(response.text);
            exchange.model = std::move(response.model);
            exchange.timestamp = std::move(response.timestamp);
            finish(ExchangeStatus::Completed, {});
            return exchange;
        } catch (const TransportError& e) {
            if (attempt >= retry.max_retries) {
                finish(ExchangeStatus::Failed, e.what());
                throw;
            }
        } catch (const CancelledError& e) {
            finish(ExchangeStatus::Cancelled, e.what());
            throw;
        } catch (const Error& e) {
            finish(ExchangeStatus::Failed, e.what());
            throw;
        }
        if (!interruptible_sleep(backoff, stop)) {
            finish(ExchangeStatus::Cancelled, "request cancelled");
            throw CancelledError();
        }
        backoff = std::chrono::milliseconds(static_cast<long long>(static_cast<double>(backoff.count()) * retry.multiplier));
    }
}

}  // namespace a11y::llm
