#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sknaflow {

enum class ErrorKind {
  io,
  parse,
  format,
  data,
  validation,
  range,
  schema,
  unsupported_ratio,
  design,
  length,
  parameter,
  degenerate,
  window,
  insufficient_data,
  spec,
  config,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries the module and operation that
// produced it, so the CLI can emit a single structured line.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, std::string operation, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }
  const std::string& operation() const noexcept { return operation_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string module_;
  std::string operation_;
  std::string detail_;
};

}  // namespace sknaflow
