#pragma once

#include <cstdlib>
#include <iostream>
#include <string>

namespace asc {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

// Level comes from ASC_LOG={error|info|debug}; stderr only, stdout stays
// machine-readable.
inline LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("ASC_LOG");
        if (!env) return LogLevel::Error;
        const std::string v(env);
        if (v == "debug") return LogLevel::Debug;
        if (v == "info") return LogLevel::Info;
        return LogLevel::Error;
    }();
    return level;
}

inline void log_error(const std::string& msg) { std::cerr << "[error] " << msg << "\n"; }

inline void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::Info) std::cerr << "[info] " << msg << "\n";
}

inline void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::Debug) std::cerr << "[debug] " << msg << "\n";
}

}  // namespace asc
