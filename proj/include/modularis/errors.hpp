#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace modularis {

// Domain failures carry a stable machine-readable code next to the human
// message. Codes in use: malformed-input, incomparable-domains, no-witness,
// not-in-space, wrong-convexity-class, axiom-violation, domain-mismatch,
// budget-exhausted, dimension-limit, invalid-chain, self-map-violation,
// idempotence-violation, operator-failure.
class DomainError : public std::runtime_error {
public:
  DomainError(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

[[noreturn]] inline void fail(std::string code, const std::string& message) {
  throw DomainError(std::move(code), message);
}

}  // namespace modularis
