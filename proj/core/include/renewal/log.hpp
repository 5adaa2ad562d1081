#ifndef RENEWAL_LOG_HPP
#define RENEWAL_LOG_HPP

#include <string>

namespace renewal {

enum class LogLevel { Off = 0, Error = 1, Warn = 2, Info = 3, Debug = 4 };

/// Level from the RENEWAL_STRINGS_LOG environment variable (off, error,
/// warn, info, debug); defaults to warn.
LogLevel log_level();

bool log_enabled(LogLevel level);
void log_message(LogLevel level, const std::string& message);

}  // namespace renewal

#endif
