#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace hebart {

// Failure classes, mapped to CLI exit codes (usage -> 2, everything else -> 1).
enum class ErrorKind { Io, Schema, Config, Numeric, Usage };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

// Log verbosity, controlled by the HEBART_LOG environment variable
// (quiet|warn|info|debug). Default: warn.
enum class LogLevel { Quiet = 0, Warn = 1, Info = 2, Debug = 3 };

inline LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("HEBART_LOG");
    if (env == nullptr) return LogLevel::Warn;
    std::string s(env);
    if (s == "quiet") return LogLevel::Quiet;
    if (s == "warn") return LogLevel::Warn;
    if (s == "info") return LogLevel::Info;
    if (s == "debug") return LogLevel::Debug;
    return LogLevel::Warn;
  }();
  return level;
}

template <typename... Args>
void log_at(LogLevel lvl, const char* fmt, Args... args) {
  if (log_level() < lvl) return;
  std::fprintf(stderr, "[hebart] ");
  std::fprintf(stderr, fmt, args...);
  std::fprintf(stderr, "\n");
}

template <typename... Args>
void log_warn(const char* fmt, Args... args) {
  log_at(LogLevel::Warn, fmt, args...);
}
template <typename... Args>
void log_info(const char* fmt, Args... args) {
  log_at(LogLevel::Info, fmt, args...);
}
template <typename... Args>
void log_debug(const char* fmt, Args... args) {
  log_at(LogLevel::Debug, fmt, args...);
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance_of(const std::vector<double>& v) {
  // Population variance (divide by n).
  double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

inline double sample_sd(const std::vector<double>& v) {
  double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// Linear-interpolation quantile on a copy of the data (R type 7).
inline double quantile_of(std::vector<double> v, double p) {
  if (v.empty()) fail(ErrorKind::Numeric, "quantile of empty vector");
  std::sort(v.begin(), v.end());
  if (p <= 0.0) return v.front();
  if (p >= 1.0) return v.back();
  double h = (static_cast<double>(v.size()) - 1.0) * p;
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = lo + 1 < v.size() ? lo + 1 : lo;
  double frac = h - std::floor(h);
  return v[lo] + frac * (v[hi] - v[lo]);
}

}  // namespace hebart
