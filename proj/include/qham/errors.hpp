#ifndef QHAM_ERRORS_HPP_
#define QHAM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace qham {

enum class ErrorKind { Config, Stability, RegisterCap, Divergence, Numerical, Other };

// Every module error carries a stable code string plus a kind that the CLI
// maps onto its exit-code contract.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& code() const { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

// 0 ok, 2 config, 3 stability, 4 register cap, 5 divergence, 1 other.
int exit_code(ErrorKind kind);

[[noreturn]] void fail(ErrorKind kind, const std::string& code, const std::string& message);

inline void require(bool cond, const std::string& code, const std::string& message,
                    ErrorKind kind = ErrorKind::Config) {
  if (!cond) fail(kind, code, message);
}

}  // namespace qham

#endif  // QHAM_ERRORS_HPP_
