#pragma once

namespace crosstune {

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

// Verbosity is read once from the CROSSTUNE_LOG environment variable
// (error|warn|info|debug, default warn). Output goes to stderr only;
// results are written to files.
LogLevel log_level();

void log_message(LogLevel level, const char* fmt, ...)
#if defined(__GNUC__)
    __attribute__((format(printf, 2, 3)))
#endif
    ;

}  // namespace crosstune

#define CT_ERROR(...) ::crosstune::log_message(::crosstune::LogLevel::kError, __VA_ARGS__)
#define CT_WARN(...) ::crosstune::log_message(::crosstune::LogLevel::kWarn, __VA_ARGS__)
#define CT_INFO(...) ::crosstune::log_message(::crosstune::LogLevel::kInfo, __VA_ARGS__)
#define CT_DEBUG(...) ::crosstune::log_message(::crosstune::LogLevel::kDebug, __VA_ARGS__)
