#pragma once

#include <cmath>

#include "stlf/formula.hpp"
#include "stlf/robustness.hpp"
#include "stlf/signal.hpp"

namespace stlf {

struct EvalOptions {
  WindowMode window_mode = WindowMode::strict;
};

// ---------------------------------------------------------------------------
// Term evaluation
// ---------------------------------------------------------------------------

/// Value of a real-valued term at sample t. Boolean signals read as 0/1
/// and enum signals as their label index.
inline double eval_mu(const MuPtr& m, const Trace& trace, long t) {
  if (auto* c = std::get_if<MuConst>(&m->node)) return c->value;
  if (auto* s = std::get_if<MuSignal>(&m->node)) {
    const Signal& sig = trace.at(s->name);
    return sig.samples[static_cast<size_t>(t)];
  }
  if (auto* b = std::get_if<MuBin>(&m->node)) {
    double l = eval_mu(b->lhs, trace, t);
    double r = eval_mu(b->rhs, trace, t);
    switch (b->op) {
      case '+': return l + r;
      case '-': return l - r;
      case '*': return l * r;
      case '/':
        if (r == 0.0) raise(Errc::domain_error, "division by zero in term");
        return l / r;
    }
    raise(Errc::invalid_argument, "bad term operator");
  }
  const auto& f = std::get<MuFunc>(m->node);
  double a = eval_mu(f.arg, trace, t);
  switch (f.fn) {
    case MuFn::abs: return std::fabs(a);
    case MuFn::sqrt:
      if (a < 0) raise(Errc::domain_error, "sqrt of negative value");
      return std::sqrt(a);
    case MuFn::sin: return std::sin(a);
    case MuFn::cos: return std::cos(a);
    case MuFn::tan: return std::tan(a);
    case MuFn::exp: return std::exp(a);
    case MuFn::log:
      if (a <= 0) raise(Errc::domain_error, "log of non-positive value");
      return std::log(a);
  }
  raise(Errc::invalid_argument, "bad term function");
}

namespace detail {

inline long atom_index(long t, int offset, long len, const char* what) {
  long i = t + offset;
  if (i >= len)
    raise(Errc::insufficient_trace, std::string(what) + ": shifted atom reads past trace end");
  return i;
}

inline bool bool_sample(const Trace& trace, const std::string& name, long t) {
  const Signal& sig = trace.at(name);
  return sig.samples[static_cast<size_t>(t)] != 0.0;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Quantitative semantics
// ---------------------------------------------------------------------------

/// Robustness of a core formula on a trace at sample t. Follows the
/// standard translation: atoms produce the signed margin (with the
/// epsilon tie-breaker for booleans and strict/equality boundaries),
/// and/or map to min/max, G/F to window min/max, and U to the max-min
/// form with a closed inner interval.
inline Robustness robustness(const FormulaPtr& f, const Trace& trace, long t,
                             const EvalOptions& opts = {}) {
  const long len = static_cast<long>(trace.length());
  if (t < 0 || t >= len) raise(Errc::invalid_argument, "start index outside trace");

  if (std::holds_alternative<FTrue>(f->node)) return Robustness::eps_pos();
  if (std::holds_alternative<FFalse>(f->node)) return Robustness::eps_neg();
  if (auto* b = std::get_if<FBool>(&f->node)) {
    long i = detail::atom_index(t, b->offset, len, "bool atom");
    bool v = detail::bool_sample(trace, b->name, i);
    if (b->negated) v = !v;
    return v ? Robustness::eps_pos() : Robustness::eps_neg();
  }
  if (auto* c = std::get_if<FCmp>(&f->node)) {
    long i = detail::atom_index(t, c->offset, len, "comparison");
    double v = eval_mu(c->mu, trace, i);
    switch (c->rel) {
      case Rel::ge: return Robustness::exact(v);
      case Rel::le: return Robustness::exact(-v);
      case Rel::gt: return v != 0.0 ? Robustness::exact(v) : Robustness::eps_neg();
      case Rel::lt: return v != 0.0 ? Robustness::exact(-v) : Robustness::eps_neg();
      case Rel::eq: return Robustness::exact(-std::fabs(v));
      case Rel::ne: return v != 0.0 ? Robustness::exact(std::fabs(v)) : Robustness::eps_neg();
    }
  }
  if (auto* n = std::get_if<FAnd>(&f->node))
    return min(robustness(n->lhs, trace, t, opts), robustness(n->rhs, trace, t, opts));
  if (auto* n = std::get_if<FOr>(&f->node))
    return max(robustness(n->lhs, trace, t, opts), robustness(n->rhs, trace, t, opts));
  if (auto* n = std::get_if<FGlobally>(&f->node)) {
    TimeIndexWindow w = window_of(n->window, t, len, trace.step(), opts.window_mode);
    Robustness acc = robustness(n->arg, trace, w.lo_index, opts);
    for (long i = w.lo_index + 1; i <= w.hi_index; ++i)
      acc = min(acc, robustness(n->arg, trace, i, opts));
    return acc;
  }
  if (auto* n = std::get_if<FEventually>(&f->node)) {
    TimeIndexWindow w = window_of(n->window, t, len, trace.step(), opts.window_mode);
    Robustness acc = robustness(n->arg, trace, w.lo_index, opts);
    for (long i = w.lo_index + 1; i <= w.hi_index; ++i)
      acc = max(acc, robustness(n->arg, trace, i, opts));
    return acc;
  }
  if (auto* n = std::get_if<FUntil>(&f->node)) {
    TimeIndexWindow w = window_of(n->window, t, len, trace.step(), opts.window_mode);
    bool any = false;
    Robustness best{};
    Robustness left_min{};  // min of lhs over [t, t'], maintained incrementally
    for (long tp = w.lo_index; tp <= w.hi_index; ++tp) {
      if (tp == w.lo_index) {
        left_min = robustness(n->lhs, trace, t, opts);
        for (long i = t + 1; i <= tp; ++i) left_min = min(left_min, robustness(n->lhs, trace, i, opts));
      } else {
        left_min = min(left_min, robustness(n->lhs, trace, tp, opts));
      }
      Robustness v = min(robustness(n->rhs, trace, tp, opts), left_min);
      best = any ? max(best, v) : v;
      any = true;
    }
    return best;
  }
  raise(Errc::invalid_argument, "robustness is defined on core formulas only");
}

// ---------------------------------------------------------------------------
// Boolean semantics (direct recursive definition, no robustness)
// ---------------------------------------------------------------------------

inline bool boolean_sat(const FormulaPtr& f, const Trace& trace, long t,
                        const EvalOptions& opts = {}) {
  const long len = static_cast<long>(trace.length());
  if (t < 0 || t >= len) raise(Errc::invalid_argument, "start index outside trace");

  if (std::holds_alternative<FTrue>(f->node)) return true;
  if (std::holds_alternative<FFalse>(f->node)) return false;
  if (auto* b = std::get_if<FBool>(&f->node)) {
    long i = detail::atom_index(t, b->offset, len, "bool atom");
    bool v = detail::bool_sample(trace, b->name, i);
    return b->negated ? !v : v;
  }
  if (auto* c = std::get_if<FCmp>(&f->node)) {
    long i = detail::atom_index(t, c->offset, len, "comparison");
    double v = eval_mu(c->mu, trace, i);
    switch (c->rel) {
      case Rel::ge: return v >= 0.0;
      case Rel::gt: return v > 0.0;
      case Rel::lt: return v < 0.0;
      case Rel::le: return v <= 0.0;
      case Rel::eq: return v == 0.0;
      case Rel::ne: return v != 0.0;
    }
  }
  if (auto* n = std::get_if<FAnd>(&f->node))
    return boolean_sat(n->lhs, trace, t, opts) && boolean_sat(n->rhs, trace, t, opts);
  if (auto* n = std::get_if<FOr>(&f->node))
    return boolean_sat(n->lhs, trace, t, opts) || boolean_sat(n->rhs, trace, t, opts);
  if (auto* n = std::get_if<FGlobally>(&f->node)) {
    TimeIndexWindow w = window_of(n->window, t, len, trace.step(), opts.window_mode);
    for (long i = w.lo_index; i <= w.hi_index; ++i)
      if (!boolean_sat(n->arg, trace, i, opts)) return false;
    return true;
  }
  if (auto* n = std::get_if<FEventually>(&f->node)) {
    TimeIndexWindow w = window_of(n->window, t, len, trace.step(), opts.window_mode);
    for (long i = w.lo_index; i <= w.hi_index; ++i)
      if (boolean_sat(n->arg, trace, i, opts)) return true;
    return false;
  }
  if (auto* n = std::get_if<FUntil>(&f->node)) {
    TimeIndexWindow w = window_of(n->window, t, len, trace.step(), opts.window_mode);
    for (long tp = w.lo_index; tp <= w.hi_index; ++tp) {
      if (!boolean_sat(n->rhs, trace, tp, opts)) continue;
      bool pre = true;
      for (long i = t; i <= tp && pre; ++i) pre = boolean_sat(n->lhs, trace, i, opts);
      if (pre) return true;
    }
    return false;
  }
  raise(Errc::invalid_argument, "boolean semantics defined on core formulas only");
}

}  // namespace stlf
