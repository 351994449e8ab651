#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lbpopt {

enum class ErrorKind {
  config,      // invalid tiling/binning/flags
  domain,      // argument outside the operation's domain
  shape,       // dimension mismatch
  degenerate,  // input too small or identically zero
  data,        // unreadable or malformed input data
  numerical,   // solver failed to converge
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // CLI exit status: 2 configuration, 3 data, 4 numerical.
  int exit_code() const noexcept;

 private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};
struct ShapeError : Error {
  explicit ShapeError(const std::string& what) : Error(ErrorKind::shape, what) {}
};
struct DegenerateInputError : Error {
  explicit DegenerateInputError(const std::string& what) : Error(ErrorKind::degenerate, what) {}
};
struct DataError : Error {
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};
struct NumericalError : Error {
  explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

}  // namespace lbpopt
