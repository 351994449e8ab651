#include "lbpopt/error.hpp"

namespace lbpopt {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return "config";
    case ErrorKind::domain: return "domain";
    case ErrorKind::shape: return "shape";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::data: return "data";
    case ErrorKind::numerical: return "numerical";
  }
  return "unknown";
}

int Error::exit_code() const noexcept {
  switch (kind_) {
    case ErrorKind::config:
    case ErrorKind::domain: return 2;
    case ErrorKind::shape:
    case ErrorKind::degenerate:
    case ErrorKind::data: return 3;
    case ErrorKind::numerical: return 4;
  }
  return 1;
}

}  // namespace lbpopt
