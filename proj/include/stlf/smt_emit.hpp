#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "stlf/formula.hpp"
#include "stlf/model.hpp"
#include "stlf/numio.hpp"

namespace stlf {

// ---------------------------------------------------------------------------
// Safety properties (the G-only checkable subset)
// ---------------------------------------------------------------------------

/// Quantifier-free predicate over model variables at the current step,
/// optionally spanning a few future samples through atom offsets produced
/// by the bounded-eventually expansion.
struct SafetyProperty {
  FormulaPtr body;
  int max_offset = 0;
  std::string text;  // human-readable form of the original requirement
};

/// Convert a requirement to a safety property. Accepts G(body) with an
/// unbounded window whose body is temporal-free, possibly after expanding
/// bounded F[0,d] subformulas (the fairness shape G F[0,d] phi included).
inline SafetyProperty to_safety_property(const FormulaPtr& formula, double step) {
  FormulaPtr core = to_core(formula);
  auto* g = std::get_if<FGlobally>(&core->node);
  if (!g) raise(Errc::property_not_safety, "checkable properties have the shape G(...)");
  if (g->window)
    raise(Errc::property_not_safety, "bounded G is not in the checkable subset; omit the interval");

  // expand bounded eventually nodes inside the body
  auto expand = [&](auto&& self, const FormulaPtr& f) -> FormulaPtr {
    if (auto* n = std::get_if<FEventually>(&f->node)) {
      (void)n;
      return expand_bounded_eventually(f, step);
    }
    if (auto* n = std::get_if<FAnd>(&f->node)) return f_and(self(self, n->lhs), self(self, n->rhs));
    if (auto* n = std::get_if<FOr>(&f->node)) return f_or(self(self, n->lhs), self(self, n->rhs));
    if (std::holds_alternative<FGlobally>(f->node) || std::holds_alternative<FUntil>(f->node))
      raise(Errc::property_not_safety, "nested temporal operator in a checkable property body");
    return f;
  };

  SafetyProperty p;
  p.body = expand(expand, g->arg);
  p.max_offset = max_atom_offset(p.body);
  p.text = to_string(formula);
  return p;
}

// ---------------------------------------------------------------------------
// Theory support
// ---------------------------------------------------------------------------

namespace smt_detail {

struct Theory {
  bool nonlinear = false;
};

inline bool expr_is_const(const ExprPtr& e) {
  if (std::holds_alternative<ExNum>(e->node) || std::holds_alternative<ExBoolLit>(e->node) ||
      std::holds_alternative<ExLabel>(e->node))
    return true;
  if (auto* n = std::get_if<ExNeg>(&e->node)) return expr_is_const(n->arg);
  return false;
}

inline void scan_expr(const ExprPtr& e, Theory& th) {
  if (auto* n = std::get_if<ExNeg>(&e->node)) return scan_expr(n->arg, th);
  if (auto* n = std::get_if<ExNot>(&e->node)) return scan_expr(n->arg, th);
  if (auto* b = std::get_if<ExBinOp>(&e->node)) {
    if (b->op == ExOp::mul && !expr_is_const(b->lhs) && !expr_is_const(b->rhs)) th.nonlinear = true;
    if (b->op == ExOp::div && !expr_is_const(b->rhs)) th.nonlinear = true;
    scan_expr(b->lhs, th);
    scan_expr(b->rhs, th);
    return;
  }
  if (auto* c = std::get_if<ExCall>(&e->node)) {
    switch (c->fn) {
      case ExFn::sin:
      case ExFn::cos:
      case ExFn::exp:
      case ExFn::log:
        raise(Errc::unsupported_theory,
              std::string("builtin '") + ex_fn_name(c->fn) + "' is non-algebraic");
      case ExFn::sqrt:
        th.nonlinear = true;
        break;
      default:
        break;
    }
    for (const auto& a : c->args) scan_expr(a, th);
  }
}

inline bool mu_is_const(const MuPtr& m) {
  if (std::holds_alternative<MuConst>(m->node)) return true;
  return false;
}

inline void scan_mu(const MuPtr& m, Theory& th) {
  if (auto* b = std::get_if<MuBin>(&m->node)) {
    if (b->op == '*' && !mu_is_const(b->lhs) && !mu_is_const(b->rhs)) th.nonlinear = true;
    if (b->op == '/' && !mu_is_const(b->rhs)) th.nonlinear = true;
    scan_mu(b->lhs, th);
    scan_mu(b->rhs, th);
    return;
  }
  if (auto* f = std::get_if<MuFunc>(&m->node)) {
    switch (f->fn) {
      case MuFn::sin:
      case MuFn::cos:
      case MuFn::tan:
      case MuFn::exp:
      case MuFn::log:
        raise(Errc::unsupported_theory,
              std::string("function '") + mu_fn_name(f->fn) + "' is non-algebraic");
      case MuFn::sqrt:
        th.nonlinear = true;
        break;
      case MuFn::abs:
        break;
    }
    scan_mu(f->arg, th);
  }
}

inline void scan_formula(const FormulaPtr& f, Theory& th) {
  if (auto* c = std::get_if<FCmp>(&f->node)) return scan_mu(c->mu, th);
  if (auto* n = std::get_if<FAnd>(&f->node)) {
    scan_formula(n->lhs, th);
    scan_formula(n->rhs, th);
    return;
  }
  if (auto* n = std::get_if<FOr>(&f->node)) {
    scan_formula(n->lhs, th);
    scan_formula(n->rhs, th);
  }
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

inline std::string smt_num(double v) {
  std::string s = exact_decimal(v);
  if (!s.empty() && s[0] == '-') return "(- " + s.substr(1) + ")";
  return s;
}

enum class Sort { real, boolean };

class Emitter {
public:
  Emitter(const ModelIR& m, std::ostream& out) : model_(m), out_(out) {
    for (const auto& d : m.inputs) sort_[d.name] = sort_of(d.kind.tag);
    for (const auto& s : m.states) sort_[s.decl.name] = sort_of(s.decl.kind.tag);
    for (const auto& o : m.outputs) sort_[o.name] = sort_of(o.type);
  }

  static Sort sort_of(KindTag t) { return t == KindTag::boolean ? Sort::boolean : Sort::real; }

  std::string at(const std::string& name, long step) const {
    return name + "@" + std::to_string(step);
  }

  void declare_step(long step) {
    for (const auto& d : model_.inputs) declare(d.name, step);
    for (const auto& s : model_.states) declare(s.decl.name, step);
    for (const auto& o : model_.outputs) declare(o.name, step);
  }

  void assert_init() {
    for (const auto& s : model_.states) {
      switch (s.decl.kind.tag) {
        case KindTag::boolean:
          line("(assert (= " + at(s.decl.name, 0) + " " + (s.init != 0.0 ? "true" : "false") + "))");
          break;
        default:
          line("(assert (= " + at(s.decl.name, 0) + " " + smt_num(s.init) + "))");
      }
    }
  }

  /// Declared input ranges and enum domains for one step.
  void assert_input_domains(long step) {
    for (const auto& d : model_.inputs) {
      const std::string v = at(d.name, step);
      switch (d.kind.tag) {
        case KindTag::real:
          line("(assert (and (<= " + smt_num(*d.kind.lo) + " " + v + ") (<= " + v + " " +
               smt_num(*d.kind.hi) + ")))");
          break;
        case KindTag::enumeration: {
          std::string dom;
          for (size_t i = 0; i < d.kind.labels.size(); ++i) {
            if (i) dom += " ";
            dom += "(= " + v + " " + smt_num(static_cast<double>(i)) + ")";
          }
          line("(assert (or " + dom + "))");
          break;
        }
        case KindTag::boolean:
          break;
      }
    }
  }

  void assert_outputs(long step) {
    for (size_t oi : output_order(model_)) {
      const OutputDecl& o = model_.outputs[oi];
      emit_assert_equal(at(o.name, step), o.expr, step);
    }
  }

  void assert_transition(long from_step) {
    for (size_t si = 0; si < model_.states.size(); ++si)
      emit_assert_equal(at(model_.states[si].decl.name, from_step + 1), model_.updates[si],
                        from_step);
  }

  /// Property instance at one step as an SMT boolean term.
  std::string prop_term(const FormulaPtr& body, long step) {
    return formula_smt(body, step);
  }

  void line(const std::string& s) { out_ << s << '\n'; }

private:
  void declare(const std::string& name, long step) {
    line("(declare-const " + at(name, step) + (sort_.at(name) == Sort::boolean ? " Bool)" : " Real)"));
  }

  void emit_assert_equal(const std::string& lhs, const ExprPtr& e, long step) {
    std::string rhs = expr_smt(e, step);
    line("(assert (= " + lhs + " " + rhs + "))");
  }

  // sqrt occurrences become fresh constrained symbols, declared before use
  std::string fresh_sqrt(const std::string& arg_smt, long step) {
    std::string name = "sqrt!" + std::to_string(sqrt_count_++) + "@" + std::to_string(step);
    line("(declare-const " + name + " Real)");
    line("(assert (= (* " + name + " " + name + ") " + arg_smt + "))");
    line("(assert (>= " + name + " 0.0))");
    return name;
  }

  std::string expr_smt(const ExprPtr& e, long step) {
    if (auto* n = std::get_if<ExNum>(&e->node)) return smt_num(n->value);
    if (auto* b = std::get_if<ExBoolLit>(&e->node)) return b->value ? "true" : "false";
    if (auto* v = std::get_if<ExVar>(&e->node)) return at(v->name, step);
    if (auto* l = std::get_if<ExLabel>(&e->node)) return smt_num(static_cast<double>(l->index));
    if (auto* n = std::get_if<ExNeg>(&e->node)) return "(- " + expr_smt(n->arg, step) + ")";
    if (auto* n = std::get_if<ExNot>(&e->node)) return "(not " + expr_smt(n->arg, step) + ")";
    if (auto* b = std::get_if<ExBinOp>(&e->node)) {
      std::string l = expr_smt(b->lhs, step);
      std::string r = expr_smt(b->rhs, step);
      const char* op = nullptr;
      switch (b->op) {
        case ExOp::add: op = "+"; break;
        case ExOp::sub: op = "-"; break;
        case ExOp::mul: op = "*"; break;
        case ExOp::div: op = "/"; break;
        case ExOp::lt: op = "<"; break;
        case ExOp::le: op = "<="; break;
        case ExOp::gt: op = ">"; break;
        case ExOp::ge: op = ">="; break;
        case ExOp::eq: op = "="; break;
        case ExOp::ne: return "(not (= " + l + " " + r + "))";
        case ExOp::and_: op = "and"; break;
        case ExOp::or_: op = "or"; break;
      }
      return std::string("(") + op + " " + l + " " + r + ")";
    }
    const auto& c = std::get<ExCall>(e->node);
    auto a = [&](size_t i) { return expr_smt(c.args[i], step); };
    switch (c.fn) {
      case ExFn::ite: return "(ite " + a(0) + " " + a(1) + " " + a(2) + ")";
      case ExFn::min: {
        std::string x = a(0), y = a(1);
        return "(ite (<= " + x + " " + y + ") " + x + " " + y + ")";
      }
      case ExFn::max: {
        std::string x = a(0), y = a(1);
        return "(ite (>= " + x + " " + y + ") " + x + " " + y + ")";
      }
      case ExFn::abs: {
        std::string x = a(0);
        return "(ite (>= " + x + " 0.0) " + x + " (- " + x + "))";
      }
      case ExFn::sat: {
        std::string x = a(0), lo = a(1), hi = a(2);
        std::string lower = "(ite (>= " + x + " " + lo + ") " + x + " " + lo + ")";
        return "(ite (<= " + lower + " " + hi + ") " + lower + " " + hi + ")";
      }
      case ExFn::sqrt: return fresh_sqrt(a(0), step);
      default:
        raise(Errc::unsupported_theory, std::string("builtin '") + ex_fn_name(c.fn) +
                                            "' has no SMT translation");
    }
  }

  std::string mu_smt(const MuPtr& m, long step) {
    if (auto* c = std::get_if<MuConst>(&m->node)) return smt_num(c->value);
    if (auto* s = std::get_if<MuSignal>(&m->node)) {
      auto it = sort_.find(s->name);
      if (it == sort_.end()) raise(Errc::unbound_signal, "property uses unknown variable '" + s->name + "'");
      if (it->second == Sort::boolean) return "(ite " + at(s->name, step) + " 1.0 0.0)";
      return at(s->name, step);
    }
    if (auto* b = std::get_if<MuBin>(&m->node)) {
      std::string l = mu_smt(b->lhs, step);
      std::string r = mu_smt(b->rhs, step);
      return std::string("(") + b->op + " " + l + " " + r + ")";
    }
    const auto& f = std::get<MuFunc>(m->node);
    std::string x = mu_smt(f.arg, step);
    switch (f.fn) {
      case MuFn::abs: return "(ite (>= " + x + " 0.0) " + x + " (- " + x + "))";
      case MuFn::sqrt: return fresh_sqrt(x, step);
      default:
        raise(Errc::unsupported_theory,
              std::string("function '") + mu_fn_name(f.fn) + "' has no SMT translation");
    }
  }

  std::string formula_smt(const FormulaPtr& f, long step) {
    if (std::holds_alternative<FTrue>(f->node)) return "true";
    if (std::holds_alternative<FFalse>(f->node)) return "false";
    if (auto* b = std::get_if<FBool>(&f->node)) {
      auto it = sort_.find(b->name);
      if (it == sort_.end() || it->second != Sort::boolean)
        raise(Errc::type_mismatch, "'" + b->name + "' is not a boolean model variable");
      std::string v = at(b->name, step + b->offset);
      return b->negated ? "(not " + v + ")" : v;
    }
    if (auto* c = std::get_if<FCmp>(&f->node)) {
      std::string m = mu_smt(c->mu, step + c->offset);
      switch (c->rel) {
        case Rel::ge: return "(>= " + m + " 0.0)";
        case Rel::gt: return "(> " + m + " 0.0)";
        case Rel::lt: return "(< " + m + " 0.0)";
        case Rel::le: return "(<= " + m + " 0.0)";
        case Rel::eq: return "(= " + m + " 0.0)";
        case Rel::ne: return "(not (= " + m + " 0.0))";
      }
    }
    if (auto* n = std::get_if<FAnd>(&f->node))
      return "(and " + formula_smt(n->lhs, step) + " " + formula_smt(n->rhs, step) + ")";
    if (auto* n = std::get_if<FOr>(&f->node))
      return "(or " + formula_smt(n->lhs, step) + " " + formula_smt(n->rhs, step) + ")";
    raise(Errc::property_not_safety, "temporal operator inside a property body");
  }

  const ModelIR& model_;
  std::ostream& out_;
  std::map<std::string, Sort> sort_;
  long sqrt_count_ = 0;
};

}  // namespace smt_detail

/// Reject models whose expressions fall outside the supported SMT theory
/// and report whether nonlinear arithmetic is needed.
inline bool model_needs_nonlinear(const ModelIR& m, const SafetyProperty& prop) {
  smt_detail::Theory th;
  for (const auto& o : m.outputs) smt_detail::scan_expr(o.expr, th);
  for (const auto& u : m.updates) smt_detail::scan_expr(u, th);
  smt_detail::scan_formula(prop.body, th);
  return th.nonlinear;
}

/// Which assertions a query contains; `unroll` below is the plain
/// falsification form.
struct SmtQuery {
  long steps = 0;                 // variables are declared for steps 0..steps
  bool with_init = true;
  std::vector<long> assume_at;    // assert the property at these steps
  std::vector<long> deny_at;      // assert the disjunction of violations here
  std::string comment;
};

inline std::string emit_smt_query(const ModelIR& m, const SafetyProperty& prop,
                                  const SmtQuery& q) {
  if (q.steps < 0) raise(Errc::invalid_argument, "steps must be >= 0");
  bool nonlinear = model_needs_nonlinear(m, prop);

  std::ostringstream out;
  out << "; stlf " << (q.comment.empty() ? "query" : q.comment) << "\n";
  out << "; model: " << (m.name.empty() ? "(unnamed)" : m.name) << "\n";
  out << "; property: " << (prop.text.empty() ? to_string(prop.body) : prop.text) << "\n";
  out << "; steps: 0.." << q.steps << "\n";
  out << "(set-logic " << (nonlinear ? "QF_NRA" : "QF_LRA") << ")\n";

  smt_detail::Emitter em(m, out);
  for (long s = 0; s <= q.steps; ++s) em.declare_step(s);
  if (q.with_init) em.assert_init();
  for (long s = 0; s <= q.steps; ++s) {
    em.assert_input_domains(s);
    em.assert_outputs(s);
  }
  for (long s = 0; s < q.steps; ++s) em.assert_transition(s);
  for (long s : q.assume_at) {
    if (s + prop.max_offset > q.steps) raise(Errc::invalid_argument, "assumption step out of range");
    std::string term = em.prop_term(prop.body, s);  // may emit helper decls first
    out << "(assert " << term << ")\n";
  }
  if (!q.deny_at.empty()) {
    std::string dis;
    for (long s : q.deny_at) {
      if (s + prop.max_offset > q.steps) raise(Errc::invalid_argument, "violation step out of range");
      if (!dis.empty()) dis += " ";
      dis += "(not " + em.prop_term(prop.body, s) + ")";
    }
    if (q.deny_at.size() == 1)
      out << "(assert " << dis << ")\n";
    else
      out << "(assert (or " << dis << "))\n";
  }
  out << "(check-sat)\n(get-model)\n";
  return out.str();
}

/// Bounded unrolling that asserts a violation of G(body) somewhere within
/// k steps: variables for steps 0..k, init, transitions, and the
/// disjunction of per-step violations. Byte-stable for fixed inputs.
inline std::string unroll(const ModelIR& m, const SafetyProperty& prop, long k) {
  if (k < 0) raise(Errc::invalid_argument, "k must be >= 0");
  if (prop.max_offset > k)
    raise(Errc::invalid_argument, "property spans more steps than the unrolling depth");
  SmtQuery q;
  q.steps = k;
  q.with_init = true;
  for (long s = 0; s + prop.max_offset <= k; ++s) q.deny_at.push_back(s);
  q.comment = "bmc unrolling, k=" + std::to_string(k);
  return emit_smt_query(m, prop, q);
}

}  // namespace stlf
