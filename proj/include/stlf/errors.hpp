#pragma once

#include <stdexcept>
#include <string>

namespace stlf {

enum class Errc {
  // parsing / structure
  syntax_error,
  parse_error,
  malformed_interval,
  unknown_function,
  unknown_builtin,
  unsupported_negation,
  nested_temporal,
  unbounded_interval,
  cyclic_dependency,
  type_mismatch,
  // evaluation
  unbound_signal,
  insufficient_trace,
  empty_window,
  domain_error,
  range_violation,
  non_uniform_sampling,
  empty_trace,
  // checking
  unsupported_theory,
  property_not_safety,
  solver_unavailable,
  solver_protocol_error,
  invalid_argument,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::syntax_error: return "SyntaxError";
    case Errc::parse_error: return "ParseError";
    case Errc::malformed_interval: return "MalformedInterval";
    case Errc::unknown_function: return "UnknownFunction";
    case Errc::unknown_builtin: return "UnknownBuiltin";
    case Errc::unsupported_negation: return "UnsupportedNegation";
    case Errc::nested_temporal: return "NestedTemporal";
    case Errc::unbounded_interval: return "UnboundedInterval";
    case Errc::cyclic_dependency: return "CyclicDependency";
    case Errc::type_mismatch: return "TypeMismatch";
    case Errc::unbound_signal: return "UnboundSignal";
    case Errc::insufficient_trace: return "InsufficientTrace";
    case Errc::empty_window: return "EmptyWindow";
    case Errc::domain_error: return "DomainError";
    case Errc::range_violation: return "RangeViolation";
    case Errc::non_uniform_sampling: return "NonUniformSampling";
    case Errc::empty_trace: return "EmptyTrace";
    case Errc::unsupported_theory: return "UnsupportedTheory";
    case Errc::property_not_safety: return "PropertyNotSafety";
    case Errc::solver_unavailable: return "SolverUnavailable";
    case Errc::solver_protocol_error: return "SolverProtocolError";
    case Errc::invalid_argument: return "InvalidArgument";
  }
  return "Error";
}

/// Single exception type for the whole library; the code tells callers
/// (and tests) which contract was violated.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace stlf
