#pragma once

#include <mutex>
#include <set>
#include <string>

#include "a11y/errors.hpp"
#include "a11y/markup.hpp"

namespace a11y::workflows::detail {

// One AI request per document at a time, process-wide.
class InFlightGuard {
public:
    explicit InFlightGuard(std::string key) : key_(std::move(key)) {
        std::lock_guard lock(mutex());
        if (!active().insert(key_).second) {
            throw PreconditionError("request already in flight for " + key_);
        }
    }
    ~InFlightGuard() {
        std::lock_guard lock(mutex());
        active().erase(key_);
    }
    InFlightGuard(const InFlightGuard&) = delete;
    InFlightGuard& operator=(const InFlightGuard&) = delete;

private:
    static std::mutex& mutex() {
        static std::mutex m;
        return m;
    }
    static std::set<std::string>& active() {
        static std::set<std::string> s;
        return s;
    }
    std::string key_;
};

inline std::size_t code_points(std::string_view text) {
    std::size_t n = 0;
    for (unsigned char c : text) n += (c & 0xC0) != 0x80;
    return n;
}

std::string file_name(const markup::SourceDocument& doc);

}  // namespace a11y::workflows::detail
