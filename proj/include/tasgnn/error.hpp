#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tasgnn {

enum class ErrorCategory {
  kParse,
  kValidation,
  kEmptyGraph,
  kIndex,
  kConfig,
  kNumerical,
  kIo,
  kData,
};

std::string_view category_name(ErrorCategory category);

// Every recoverable failure in the library is reported through this type.
// The CLI maps the category onto a single machine-parsable line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory category, const std::string& message) {
  throw Error(category, message);
}

}  // namespace tasgnn
