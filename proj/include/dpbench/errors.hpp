#pragma once

#include <stdexcept>
#include <string>

namespace dpbench {

// Every failure the library reports derives from Error so callers (the CLI in
// particular) can map categories onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DPBENCH_DECLARE_ERROR(Name)            \
  class Name : public Error {                  \
   public:                                     \
    using Error::Error;                        \
  }

DPBENCH_DECLARE_ERROR(RangeError);
DPBENCH_DECLARE_ERROR(DivideByZero);
DPBENCH_DECLARE_ERROR(DomainError);
DPBENCH_DECLARE_ERROR(CapacityError);
DPBENCH_DECLARE_ERROR(ValidationError);
DPBENCH_DECLARE_ERROR(IoError);
DPBENCH_DECLARE_ERROR(SchemaError);
DPBENCH_DECLARE_ERROR(DeviceError);
DPBENCH_DECLARE_ERROR(FeatureError);
DPBENCH_DECLARE_ERROR(ShaderError);
DPBENCH_DECLARE_ERROR(UsageError);

#undef DPBENCH_DECLARE_ERROR

// ParseError carries the 1-based line (or byte offset for binary inputs) so
// messages can point at the offending record.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line = -1)
      : Error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

}  // namespace dpbench
