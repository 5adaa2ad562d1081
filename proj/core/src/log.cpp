#include "renewal/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace renewal {

namespace {

LogLevel parse_level() {
    const char* env = std::getenv("RENEWAL_STRINGS_LOG");
    if (env == nullptr) return LogLevel::Warn;
    if (std::strcmp(env, "off") == 0 || std::strcmp(env, "none") == 0) return LogLevel::Off;
    if (std::strcmp(env, "error") == 0) return LogLevel::Error;
    if (std::strcmp(env, "warn") == 0) return LogLevel::Warn;
    if (std::strcmp(env, "info") == 0) return LogLevel::Info;
    if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    return LogLevel::Warn;
}

const char* level_name(LogLevel level) {
    switch (level) {
        case LogLevel::Error: return "error";
        case LogLevel::Warn: return "warn";
        case LogLevel::Info: return "info";
        case LogLevel::Debug: return "debug";
        default: return "off";
    }
}

}  // namespace

LogLevel log_level() {
    static const LogLevel level = parse_level();
    return level;
}

bool log_enabled(LogLevel level) {
    return static_cast<int>(level) <= static_cast<int>(log_level());
}

void log_message(LogLevel level, const std::string& message) {
    if (!log_enabled(level)) return;
    std::fprintf(stderr, "[%s] %s\n", level_name(level), message.c_str());
}

}  // namespace renewal
