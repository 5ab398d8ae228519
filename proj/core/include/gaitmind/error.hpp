#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gaitmind {

enum class ErrorKind {
  InvalidShape,
  InvalidRange,
  InvalidState,
  InvalidLabel,
  InvalidInput,
  InvalidConfig,
  InsufficientData,
  Parse,
  CorruptFile,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library. Callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace gaitmind
