#pragma once

#include <stdexcept>
#include <string>

namespace advsharp {

// Error categories. The C API maps each one onto an advsharp_status code.
enum class ErrorKind {
  InvalidArgument,
  Dimension,
  Format,
  Consistency,
  Io,
  Data,
  InvalidSpec,
  Diverged,
  NotSymmetric,
  Config,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace advsharp
