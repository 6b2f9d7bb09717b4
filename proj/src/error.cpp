#include "tasgnn/error.hpp"

namespace tasgnn {

std::string_view category_name(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kParse: return "parse";
    case ErrorCategory::kValidation: return "validation";
    case ErrorCategory::kEmptyGraph: return "empty_graph";
    case ErrorCategory::kIndex: return "index";
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kNumerical: return "numerical";
    case ErrorCategory::kIo: return "io";
    case ErrorCategory::kData: return "data";
  }
  return "unknown";
}

}  // namespace tasgnn
