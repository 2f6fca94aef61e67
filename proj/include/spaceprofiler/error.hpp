#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace spaceprofiler {

enum class ErrorKind {
  parse,
  duplicate,
  domain,
  dimension,
  config,
  alignment,
  isolated_node,
  numeric,
  schema,
  insufficient_data,
  io,
};

std::string_view to_string(ErrorKind kind);

/// Base error for every failure raised by the library. `kind()` lets callers
/// and tests distinguish failure classes without a type per class.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(ErrorKind::parse,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Collects non-fatal diagnostics. Pass a pointer to functions that may warn;
/// a null pointer discards the messages.
class WarningLog {
 public:
  void warn(std::string message) { messages_.push_back(std::move(message)); }
  const std::vector<std::string>& messages() const noexcept {
    return messages_;
  }
  bool empty() const noexcept { return messages_.empty(); }
  void append(const WarningLog& other) {
    messages_.insert(messages_.end(), other.messages_.begin(),
                     other.messages_.end());
  }

 private:
  std::vector<std::string> messages_;
};

inline void warn(WarningLog* log, std::string message) {
  if (log != nullptr) log->warn(std::move(message));
}

}  // namespace spaceprofiler
