#include "qham/errors.hpp"

namespace qham {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return 2;
    case ErrorKind::Stability: return 3;
    case ErrorKind::RegisterCap: return 4;
    case ErrorKind::Divergence: return 5;
    default: return 1;
  }
}

void fail(ErrorKind kind, const std::string& code, const std::string& message) {
  throw Error(kind, code, code + ": " + message);
}

}  // namespace qham
