#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace sticky {

enum class LogLevel : int { error = 0, info = 1, debug = 2 };

// Level comes from STICKY_LOG={error|info|debug}; default error.
inline LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("STICKY_LOG");
        if (env == nullptr) return LogLevel::error;
        if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
        if (std::strcmp(env, "info") == 0) return LogLevel::info;
        return LogLevel::error;
    }();
    return level;
}

inline void log_error(const std::string& msg) {
    std::fprintf(stderr, "[sticky:error] %s\n", msg.c_str());
}

inline void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::info) std::fprintf(stderr, "[sticky:info] %s\n", msg.c_str());
}

inline void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::debug) std::fprintf(stderr, "[sticky:debug] %s\n", msg.c_str());
}

}  // namespace sticky
