#pragma once

#include <string>
#include <utility>
#include <variant>

namespace latrec {

/// Structured failure: where it happened and a short machine-readable reason.
struct Failure {
  std::string stage;
  std::string reason;
  std::string detail;
};

template <class T>
class Outcome {
 public:
  Outcome(T value) : v_(std::move(value)) {}
  Outcome(Failure failure) : v_(std::move(failure)) {}

  bool ok() const { return v_.index() == 0; }
  explicit operator bool() const { return ok(); }
  const T& value() const { return std::get<0>(v_); }
  T& value() { return std::get<0>(v_); }
  const Failure& failure() const { return std::get<1>(v_); }

 private:
  std::variant<T, Failure> v_;
};

/// Counters threaded through solvers; null pointers are allowed everywhere.
struct SolveStats {
  long lll_invocations = 0;
  long pslq_iterations = 0;
};

inline Failure fail(std::string stage, std::string reason, std::string detail = {}) {
  return Failure{std::move(stage), std::move(reason), std::move(detail)};
}

/// Re-tags a failure from a nested call with the outer stage prefix.
inline Failure nest(const std::string& stage, const Failure& inner) {
  return Failure{stage + "/" + inner.stage, inner.reason, inner.detail};
}

}  // namespace latrec
