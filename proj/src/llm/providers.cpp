#include <condition_variable>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "a11y/errors.hpp"
#include "a11y/llm.hpp"

namespace a11y::llm {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 computation failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xF];
    }
    return out;
}

std::string replay_key(TemplateId id, std::string_view prompt) {
    std::string material(to_string(id));
    material += '\0';
    material += prompt;
    return sha256_hex(material);
}

std::string utc_timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

fs::path write_fixture(const fs::path& dir, TemplateId id, std::string_view prompt, std::string_view response,
                       std::string_view model, std::string_view timestamp) {
    fs::create_directories(dir);
    Json fixture = {
        {"template_id", to_string(id)},
        {"model", model},
        {"timestamp", timestamp},
        {"prompt", prompt},
        {"response", response},
    };
    const auto path = dir / (replay_key(id, prompt) + ".json");
    const auto tmp = fs::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write fixture " + tmp.string());
        out << fixture.dump(2, ' ', false, Json::error_handler_t::replace) << '\n';
    }
    fs::rename(tmp, path);
    return path;
}

// ---- replay -------------------------------------------------------------------

ReplayProvider::ReplayProvider(fs::path dir) : dirs_{std::move(dir)} {}

ReplayProvider::ReplayProvider(std::vector<fs::path> dirs) : dirs_(std::move(dirs)) {}

CompletionResponse ReplayProvider::generate(const CompletionRequest& request, std::stop_token stop) {
    if (stop.stop_requested()) throw CancelledError();
    const auto key = replay_key(request.template_id, request.prompt);
    for (const auto& dir : dirs_) {
        const auto path = dir / (key + ".json");
        std::ifstream in(path, std::ios::binary);
        if (!in) continue;
        auto fixture = Json::parse(in, nullptr, false);
        if (fixture.is_discarded() || !fixture.contains("response")) {
            throw Error("malformed replay fixture " + path.string());
        }
        if (fixture.value("prompt", std::string()) != request.prompt) {
            throw Error("replay fixture " + path.string() + " was recorded for a different prompt");
        }
        return {fixture["response"].get<std::string>(), fixture.value("model", request.params.model),
                fixture.value("timestamp", std::string())};
    }
    throw FixtureNotFound(key);
}

// ---- scripted ---------------------------------------------------------------

ScriptedProvider::ScriptedProvider(Responder responder, std::string timestamp)
    : responder_(std::move(responder)), timestamp_(std::move(timestamp)) {}

CompletionResponse ScriptedProvider::generate(const CompletionRequest& request, std::stop_token stop) {
    if (stop.stop_requested()) throw CancelledError();
    return {responder_(request), request.params.model, timestamp_};
}

// ---- recording ----------------------------------------------------------------

RecordingProvider::RecordingProvider(Provider& inner, fs::path dir) : inner_(inner), dir_(std::move(dir)) {}

CompletionResponse RecordingProvider::generate(const CompletionRequest& request, std::stop_token stop) {
    auto response = inner_.generate(request, stop);
    write_fixture(dir_, request.template_id, request.prompt, response.text, response.model, response.timestamp);
    return response;
}

// ---- fault injection ----------------------------------------------------------

FaultInjectingProvider::FaultInjectingProvider(Provider& inner, std::vector<Step> steps)
    : inner_(inner), steps_(std::move(steps)) {}

int FaultInjectingProvider::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

CompletionResponse FaultInjectingProvider::generate(const CompletionRequest& request, std::stop_token stop) {
    std::optional<Step> step;
    {
        std::lock_guard lock(mutex_);
        if (static_cast<std::size_t>(calls_) < steps_.size()) step = steps_[static_cast<std::size_t>(calls_)];
        ++calls_;
    }
    if (!step) return inner_.generate(request, stop);
    switch (step->fault) {
        case Fault::Timeout: throw TransportError("request timed out");
        case Fault::HttpError: throw ProviderError(step->status, step->body);
        case Fault::Hang: {
            std::mutex m;
            std::condition_variable_any cv;
            std::unique_lock lock(m);
            cv.wait(lock, stop, [] { return false; });
            throw CancelledError();
        }
    }
    return inner_.generate(request, stop);
}

}  // namespace a11y::llm
