#include "sfield/error.hpp"

namespace sfield {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid input";
    case ErrorKind::invalid_config: return "invalid configuration";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::numerical: return "numerical failure";
    case ErrorKind::domain: return "domain error";
    case ErrorKind::io: return "i/o error";
  }
  return "error";
}

}  // namespace sfield
