#include "sknaflow/error.hpp"

namespace sknaflow {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return "io";
    case ErrorKind::parse: return "parse";
    case ErrorKind::format: return "format";
    case ErrorKind::data: return "data";
    case ErrorKind::validation: return "validation";
    case ErrorKind::range: return "range";
    case ErrorKind::schema: return "schema";
    case ErrorKind::unsupported_ratio: return "unsupported-ratio";
    case ErrorKind::design: return "design";
    case ErrorKind::length: return "length";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::window: return "window";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::spec: return "spec";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, std::string module, std::string operation, const std::string& detail)
    : std::runtime_error(module + "." + operation + ": " + std::string(to_string(kind)) + " error: " + detail),
      kind_(kind),
      module_(std::move(module)),
      operation_(std::move(operation)),
      detail_(detail) {}

}  // namespace sknaflow
