#pragma once

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "stlf/numio.hpp"
#include "stlf/signal.hpp"

namespace stlf {

// ---------------------------------------------------------------------------
// Real-valued terms (mu)
// ---------------------------------------------------------------------------

enum class MuFn { abs, sqrt, sin, cos, tan, exp, log };

inline const char* mu_fn_name(MuFn f) {
  switch (f) {
    case MuFn::abs: return "abs";
    case MuFn::sqrt: return "sqrt";
    case MuFn::sin: return "sin";
    case MuFn::cos: return "cos";
    case MuFn::tan: return "tan";
    case MuFn::exp: return "exp";
    case MuFn::log: return "log";
  }
  return "?";
}

struct Mu;
using MuPtr = std::shared_ptr<const Mu>;

struct MuConst {
  double value;
};
struct MuSignal {
  std::string name;
};
struct MuBin {
  char op;  // '+', '-', '*', '/'
  MuPtr lhs, rhs;
};
struct MuFunc {
  MuFn fn;
  MuPtr arg;
};

struct Mu {
  std::variant<MuConst, MuSignal, MuBin, MuFunc> node;
};

inline MuPtr mu_const(double v) { return std::make_shared<Mu>(Mu{MuConst{v}}); }
inline MuPtr mu_signal(std::string name) { return std::make_shared<Mu>(Mu{MuSignal{std::move(name)}}); }
inline MuPtr mu_bin(char op, MuPtr a, MuPtr b) {
  return std::make_shared<Mu>(Mu{MuBin{op, std::move(a), std::move(b)}});
}
inline MuPtr mu_func(MuFn fn, MuPtr a) { return std::make_shared<Mu>(Mu{MuFunc{fn, std::move(a)}}); }

// ---------------------------------------------------------------------------
// Formulas
// ---------------------------------------------------------------------------

/// Relational operator of an atom, always against literal zero.
enum class Rel { ge, gt, lt, le, eq, ne };

inline const char* rel_text(Rel r) {
  switch (r) {
    case Rel::ge: return ">=";
    case Rel::gt: return ">";
    case Rel::lt: return "<";
    case Rel::le: return "<=";
    case Rel::eq: return "=";
    case Rel::ne: return "!=";
  }
  return "?";
}

inline Rel rel_negate(Rel r) {
  switch (r) {
    case Rel::ge: return Rel::lt;
    case Rel::gt: return Rel::le;
    case Rel::lt: return Rel::ge;
    case Rel::le: return Rel::gt;
    case Rel::eq: return Rel::ne;
    case Rel::ne: return Rel::eq;
  }
  return r;
}

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct FTrue {};
struct FFalse {};

/// Boolean signal atom; `negated` holds the atom's complement so that the
/// core language needs no general negation node.
struct FBool {
  std::string name;
  bool negated = false;
  int offset = 0;  // sample shift introduced by bounded-F expansion
};

/// mu rel 0, with constants already folded into mu.
struct FCmp {
  MuPtr mu;
  Rel rel = Rel::ge;
  int offset = 0;
};

struct FNot {  // surface only
  FormulaPtr arg;
};
struct FImplies {  // surface only
  FormulaPtr lhs, rhs;
};
struct FAnd {
  FormulaPtr lhs, rhs;
};
struct FOr {
  FormulaPtr lhs, rhs;
};
struct FGlobally {
  MaybeInterval window;
  FormulaPtr arg;
};
struct FEventually {
  MaybeInterval window;
  FormulaPtr arg;
};
struct FUntil {
  MaybeInterval window;
  FormulaPtr lhs, rhs;
};

struct Formula {
  std::variant<FTrue, FFalse, FBool, FCmp, FNot, FImplies, FAnd, FOr, FGlobally, FEventually,
               FUntil>
      node;
};

inline FormulaPtr f_true() { return std::make_shared<Formula>(Formula{FTrue{}}); }
inline FormulaPtr f_false() { return std::make_shared<Formula>(Formula{FFalse{}}); }
inline FormulaPtr f_bool(std::string name, bool negated = false, int offset = 0) {
  return std::make_shared<Formula>(Formula{FBool{std::move(name), negated, offset}});
}
inline FormulaPtr f_cmp(MuPtr mu, Rel rel, int offset = 0) {
  return std::make_shared<Formula>(Formula{FCmp{std::move(mu), rel, offset}});
}
inline FormulaPtr f_not(FormulaPtr a) { return std::make_shared<Formula>(Formula{FNot{std::move(a)}}); }
inline FormulaPtr f_implies(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<Formula>(Formula{FImplies{std::move(a), std::move(b)}});
}
inline FormulaPtr f_and(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<Formula>(Formula{FAnd{std::move(a), std::move(b)}});
}
inline FormulaPtr f_or(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<Formula>(Formula{FOr{std::move(a), std::move(b)}});
}
inline FormulaPtr f_globally(MaybeInterval w, FormulaPtr a) {
  return std::make_shared<Formula>(Formula{FGlobally{w, std::move(a)}});
}
inline FormulaPtr f_eventually(MaybeInterval w, FormulaPtr a) {
  return std::make_shared<Formula>(Formula{FEventually{w, std::move(a)}});
}
inline FormulaPtr f_until(MaybeInterval w, FormulaPtr a, FormulaPtr b) {
  return std::make_shared<Formula>(Formula{FUntil{w, std::move(a), std::move(b)}});
}

// ---------------------------------------------------------------------------
// Structural helpers
// ---------------------------------------------------------------------------

inline bool mu_equal(const MuPtr& a, const MuPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  if (auto* c = std::get_if<MuConst>(&a->node)) return c->value == std::get<MuConst>(b->node).value;
  if (auto* s = std::get_if<MuSignal>(&a->node)) return s->name == std::get<MuSignal>(b->node).name;
  if (auto* x = std::get_if<MuBin>(&a->node)) {
    const auto& y = std::get<MuBin>(b->node);
    return x->op == y.op && mu_equal(x->lhs, y.lhs) && mu_equal(x->rhs, y.rhs);
  }
  const auto& x = std::get<MuFunc>(a->node);
  const auto& y = std::get<MuFunc>(b->node);
  return x.fn == y.fn && mu_equal(x.arg, y.arg);
}

inline bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  if (std::holds_alternative<FTrue>(a->node) || std::holds_alternative<FFalse>(a->node))
    return true;
  if (auto* x = std::get_if<FBool>(&a->node)) {
    const auto& y = std::get<FBool>(b->node);
    return x->name == y.name && x->negated == y.negated && x->offset == y.offset;
  }
  if (auto* x = std::get_if<FCmp>(&a->node)) {
    const auto& y = std::get<FCmp>(b->node);
    return x->rel == y.rel && x->offset == y.offset && mu_equal(x->mu, y.mu);
  }
  if (auto* x = std::get_if<FNot>(&a->node)) return formula_equal(x->arg, std::get<FNot>(b->node).arg);
  if (auto* x = std::get_if<FImplies>(&a->node)) {
    const auto& y = std::get<FImplies>(b->node);
    return formula_equal(x->lhs, y.lhs) && formula_equal(x->rhs, y.rhs);
  }
  if (auto* x = std::get_if<FAnd>(&a->node)) {
    const auto& y = std::get<FAnd>(b->node);
    return formula_equal(x->lhs, y.lhs) && formula_equal(x->rhs, y.rhs);
  }
  if (auto* x = std::get_if<FOr>(&a->node)) {
    const auto& y = std::get<FOr>(b->node);
    return formula_equal(x->lhs, y.lhs) && formula_equal(x->rhs, y.rhs);
  }
  if (auto* x = std::get_if<FGlobally>(&a->node)) {
    const auto& y = std::get<FGlobally>(b->node);
    return x->window == y.window && formula_equal(x->arg, y.arg);
  }
  if (auto* x = std::get_if<FEventually>(&a->node)) {
    const auto& y = std::get<FEventually>(b->node);
    return x->window == y.window && formula_equal(x->arg, y.arg);
  }
  const auto& x = std::get<FUntil>(a->node);
  const auto& y = std::get<FUntil>(b->node);
  return x.window == y.window && formula_equal(x.lhs, y.lhs) && formula_equal(x.rhs, y.rhs);
}

inline bool is_temporal(const FormulaPtr& f) {
  return std::holds_alternative<FGlobally>(f->node) ||
         std::holds_alternative<FEventually>(f->node) || std::holds_alternative<FUntil>(f->node);
}

inline bool contains_temporal(const FormulaPtr& f) {
  if (is_temporal(f)) return true;
  if (auto* n = std::get_if<FNot>(&f->node)) return contains_temporal(n->arg);
  if (auto* n = std::get_if<FImplies>(&f->node))
    return contains_temporal(n->lhs) || contains_temporal(n->rhs);
  if (auto* n = std::get_if<FAnd>(&f->node))
    return contains_temporal(n->lhs) || contains_temporal(n->rhs);
  if (auto* n = std::get_if<FOr>(&f->node))
    return contains_temporal(n->lhs) || contains_temporal(n->rhs);
  return false;
}

inline bool is_core(const FormulaPtr& f) {
  if (std::holds_alternative<FNot>(f->node) || std::holds_alternative<FImplies>(f->node))
    return false;
  if (auto* n = std::get_if<FAnd>(&f->node)) return is_core(n->lhs) && is_core(n->rhs);
  if (auto* n = std::get_if<FOr>(&f->node)) return is_core(n->lhs) && is_core(n->rhs);
  if (auto* n = std::get_if<FGlobally>(&f->node)) return is_core(n->arg);
  if (auto* n = std::get_if<FEventually>(&f->node)) return is_core(n->arg);
  if (auto* n = std::get_if<FUntil>(&f->node)) return is_core(n->lhs) && is_core(n->rhs);
  return true;
}

// ---------------------------------------------------------------------------
// Negation-normal rewriting
// ---------------------------------------------------------------------------

inline FormulaPtr to_core(const FormulaPtr& f);

namespace detail {
inline FormulaPtr negate_core(const FormulaPtr& f) {
  if (std::holds_alternative<FTrue>(f->node)) return f_false();
  if (std::holds_alternative<FFalse>(f->node)) return f_true();
  if (auto* b = std::get_if<FBool>(&f->node)) return f_bool(b->name, !b->negated, b->offset);
  if (auto* c = std::get_if<FCmp>(&f->node)) return f_cmp(c->mu, rel_negate(c->rel), c->offset);
  if (auto* n = std::get_if<FNot>(&f->node)) return to_core(n->arg);
  if (auto* n = std::get_if<FImplies>(&f->node))
    return f_and(to_core(n->lhs), negate_core(to_core(n->rhs)));
  if (auto* n = std::get_if<FAnd>(&f->node))
    return f_or(negate_core(to_core(n->lhs)), negate_core(to_core(n->rhs)));
  if (auto* n = std::get_if<FOr>(&f->node))
    return f_and(negate_core(to_core(n->lhs)), negate_core(to_core(n->rhs)));
  if (auto* n = std::get_if<FGlobally>(&f->node))
    return f_eventually(n->window, negate_core(to_core(n->arg)));
  if (auto* n = std::get_if<FEventually>(&f->node))
    return f_globally(n->window, negate_core(to_core(n->arg)));
  raise(Errc::unsupported_negation, "negation over until has no core form");
}
}  // namespace detail

/// Eliminate Not and Implies, pushing negation onto atoms.
inline FormulaPtr to_core(const FormulaPtr& f) {
  if (auto* n = std::get_if<FNot>(&f->node)) return detail::negate_core(to_core(n->arg));
  if (auto* n = std::get_if<FImplies>(&f->node))
    return f_or(detail::negate_core(to_core(n->lhs)), to_core(n->rhs));
  if (auto* n = std::get_if<FAnd>(&f->node)) return f_and(to_core(n->lhs), to_core(n->rhs));
  if (auto* n = std::get_if<FOr>(&f->node)) return f_or(to_core(n->lhs), to_core(n->rhs));
  if (auto* n = std::get_if<FGlobally>(&f->node)) return f_globally(n->window, to_core(n->arg));
  if (auto* n = std::get_if<FEventually>(&f->node)) return f_eventually(n->window, to_core(n->arg));
  if (auto* n = std::get_if<FUntil>(&f->node))
    return f_until(n->window, to_core(n->lhs), to_core(n->rhs));
  return f;
}

// ---------------------------------------------------------------------------
// Temporal requirement patterns
// ---------------------------------------------------------------------------

enum class Pattern { invariance, steady_state, smoothness, responsiveness, fairness };

/// T1: G phi
inline FormulaPtr pattern_invariance(FormulaPtr phi) { return f_globally({}, std::move(phi)); }
/// T2: F[0,d] G phi
inline FormulaPtr pattern_steady_state(double d, FormulaPtr phi) {
  return f_eventually(Interval::checked(0, d), f_globally({}, std::move(phi)));
}
/// T3: G (psi -> G phi)
inline FormulaPtr pattern_smoothness(FormulaPtr psi, FormulaPtr phi) {
  return f_globally({}, f_implies(std::move(psi), f_globally({}, std::move(phi))));
}
/// T4: F[0,d] phi
inline FormulaPtr pattern_responsiveness(double d, FormulaPtr phi) {
  return f_eventually(Interval::checked(0, d), std::move(phi));
}
/// T5: G F[0,d] phi
inline FormulaPtr pattern_fairness(double d, FormulaPtr phi) {
  return f_globally({}, f_eventually(Interval::checked(0, d), std::move(phi)));
}

// ---------------------------------------------------------------------------
// Bounded-eventually expansion
// ---------------------------------------------------------------------------

namespace detail {
inline FormulaPtr shift_atoms(const FormulaPtr& f, int delta) {
  if (auto* b = std::get_if<FBool>(&f->node)) return f_bool(b->name, b->negated, b->offset + delta);
  if (auto* c = std::get_if<FCmp>(&f->node)) return f_cmp(c->mu, c->rel, c->offset + delta);
  if (std::holds_alternative<FTrue>(f->node) || std::holds_alternative<FFalse>(f->node)) return f;
  if (auto* n = std::get_if<FNot>(&f->node)) return f_not(shift_atoms(n->arg, delta));
  if (auto* n = std::get_if<FImplies>(&f->node))
    return f_implies(shift_atoms(n->lhs, delta), shift_atoms(n->rhs, delta));
  if (auto* n = std::get_if<FAnd>(&f->node))
    return f_and(shift_atoms(n->lhs, delta), shift_atoms(n->rhs, delta));
  if (auto* n = std::get_if<FOr>(&f->node))
    return f_or(shift_atoms(n->lhs, delta), shift_atoms(n->rhs, delta));
  raise(Errc::nested_temporal, "cannot shift a temporal subformula");
}
}  // namespace detail

/// Rewrite F[0,d] phi into the disjunction of floor(d/step)+1 step-shifted
/// copies of phi. Only legal when phi is temporal-free.
inline FormulaPtr expand_bounded_eventually(const FormulaPtr& f, double step) {
  auto* ev = std::get_if<FEventually>(&f->node);
  if (!ev) raise(Errc::invalid_argument, "expansion applies to an eventually formula");
  if (!ev->window) raise(Errc::unbounded_interval, "expansion needs a bounded interval");
  if (contains_temporal(ev->arg))
    raise(Errc::nested_temporal, "eventually argument contains a temporal operator");
  long lo = detail::div_ceil(ev->window->lo, step);
  long hi = detail::div_floor(ev->window->hi, step);
  if (lo > hi) raise(Errc::empty_window, "interval discretizes to no sample");
  FormulaPtr out = detail::shift_atoms(ev->arg, static_cast<int>(lo));
  for (long i = lo + 1; i <= hi; ++i)
    out = f_or(std::move(out), detail::shift_atoms(ev->arg, static_cast<int>(i)));
  return out;
}

/// Largest atom offset in a formula; the property spans steps t..t+offset.
inline int max_atom_offset(const FormulaPtr& f) {
  if (auto* b = std::get_if<FBool>(&f->node)) return b->offset;
  if (auto* c = std::get_if<FCmp>(&f->node)) return c->offset;
  if (auto* n = std::get_if<FNot>(&f->node)) return max_atom_offset(n->arg);
  if (auto* n = std::get_if<FImplies>(&f->node))
    return std::max(max_atom_offset(n->lhs), max_atom_offset(n->rhs));
  if (auto* n = std::get_if<FAnd>(&f->node))
    return std::max(max_atom_offset(n->lhs), max_atom_offset(n->rhs));
  if (auto* n = std::get_if<FOr>(&f->node))
    return std::max(max_atom_offset(n->lhs), max_atom_offset(n->rhs));
  if (auto* n = std::get_if<FGlobally>(&f->node)) return max_atom_offset(n->arg);
  if (auto* n = std::get_if<FEventually>(&f->node)) return max_atom_offset(n->arg);
  if (auto* n = std::get_if<FUntil>(&f->node))
    return std::max(max_atom_offset(n->lhs), max_atom_offset(n->rhs));
  return 0;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

inline std::string to_string(const MuPtr& m) {
  if (auto* c = std::get_if<MuConst>(&m->node)) return format_double(c->value);
  if (auto* s = std::get_if<MuSignal>(&m->node)) return s->name;
  if (auto* b = std::get_if<MuBin>(&m->node))
    return "(" + to_string(b->lhs) + " " + b->op + " " + to_string(b->rhs) + ")";
  const auto& f = std::get<MuFunc>(m->node);
  return std::string(mu_fn_name(f.fn)) + "(" + to_string(f.arg) + ")";
}

inline std::string to_string(const FormulaPtr& f) {
  auto win = [](const MaybeInterval& w) -> std::string {
    if (!w) return "";
    return "[" + format_double(w->lo) + "," + format_double(w->hi) + "]";
  };
  auto off = [](int o) -> std::string { return o ? "@+" + std::to_string(o) : ""; };
  if (std::holds_alternative<FTrue>(f->node)) return "true";
  if (std::holds_alternative<FFalse>(f->node)) return "false";
  if (auto* b = std::get_if<FBool>(&f->node))
    return std::string(b->negated ? "!" : "") + b->name + off(b->offset);
  if (auto* c = std::get_if<FCmp>(&f->node))
    return "(" + to_string(c->mu) + " " + rel_text(c->rel) + " 0)" + off(c->offset);
  if (auto* n = std::get_if<FNot>(&f->node)) return "!(" + to_string(n->arg) + ")";
  if (auto* n = std::get_if<FImplies>(&f->node))
    return "(" + to_string(n->lhs) + " -> " + to_string(n->rhs) + ")";
  if (auto* n = std::get_if<FAnd>(&f->node))
    return "(" + to_string(n->lhs) + " && " + to_string(n->rhs) + ")";
  if (auto* n = std::get_if<FOr>(&f->node))
    return "(" + to_string(n->lhs) + " || " + to_string(n->rhs) + ")";
  if (auto* n = std::get_if<FGlobally>(&f->node)) return "G" + win(n->window) + "(" + to_string(n->arg) + ")";
  if (auto* n = std::get_if<FEventually>(&f->node))
    return "F" + win(n->window) + "(" + to_string(n->arg) + ")";
  const auto& u = std::get<FUntil>(f->node);
  return "(" + to_string(u.lhs) + " U" + win(u.window) + " " + to_string(u.rhs) + ")";
}

}  // namespace stlf
