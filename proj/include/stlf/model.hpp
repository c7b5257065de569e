#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "stlf/numio.hpp"
#include "stlf/signal.hpp"

namespace stlf {

// ---------------------------------------------------------------------------
// Model expressions
// ---------------------------------------------------------------------------

enum class ExOp {
  add, sub, mul, div,
  lt, le, gt, ge, eq, ne,
  and_, or_,
};

enum class ExFn { sat, min, max, abs, ite, sqrt, sin, cos, exp, log };

inline const char* ex_fn_name(ExFn f) {
  switch (f) {
    case ExFn::sat: return "sat";
    case ExFn::min: return "min";
    case ExFn::max: return "max";
    case ExFn::abs: return "abs";
    case ExFn::ite: return "ite";
    case ExFn::sqrt: return "sqrt";
    case ExFn::sin: return "sin";
    case ExFn::cos: return "cos";
    case ExFn::exp: return "exp";
    case ExFn::log: return "log";
  }
  return "?";
}

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct ExNum {
  double value;
};
struct ExBoolLit {
  bool value;
};
struct ExVar {
  std::string name;
};
/// Enum label literal; resolved against the compared variable's labels
/// during type checking.
struct ExLabel {
  std::string label;
  int index = -1;
};
struct ExNeg {
  ExprPtr arg;
};
struct ExNot {
  ExprPtr arg;
};
struct ExBinOp {
  ExOp op;
  ExprPtr lhs, rhs;
};
struct ExCall {
  ExFn fn;
  std::vector<ExprPtr> args;
};

struct Expr {
  std::variant<ExNum, ExBoolLit, ExVar, ExLabel, ExNeg, ExNot, ExBinOp, ExCall> node;
};

inline ExprPtr ex_num(double v) { return std::make_shared<Expr>(Expr{ExNum{v}}); }
inline ExprPtr ex_bool(bool v) { return std::make_shared<Expr>(Expr{ExBoolLit{v}}); }
inline ExprPtr ex_var(std::string n) { return std::make_shared<Expr>(Expr{ExVar{std::move(n)}}); }
inline ExprPtr ex_label(std::string l, int idx = -1) {
  return std::make_shared<Expr>(Expr{ExLabel{std::move(l), idx}});
}
inline ExprPtr ex_neg(ExprPtr a) { return std::make_shared<Expr>(Expr{ExNeg{std::move(a)}}); }
inline ExprPtr ex_not(ExprPtr a) { return std::make_shared<Expr>(Expr{ExNot{std::move(a)}}); }
inline ExprPtr ex_bin(ExOp op, ExprPtr a, ExprPtr b) {
  return std::make_shared<Expr>(Expr{ExBinOp{op, std::move(a), std::move(b)}});
}
inline ExprPtr ex_call(ExFn fn, std::vector<ExprPtr> args) {
  return std::make_shared<Expr>(Expr{ExCall{fn, std::move(args)}});
}

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

struct VarDecl {
  std::string name;
  Kind kind;
};

struct StateDecl {
  VarDecl decl;
  double init = 0.0;  // boolean states store 0/1, enums the label index
};

struct OutputDecl {
  std::string name;
  ExprPtr expr;
  KindTag type = KindTag::real;  // inferred during validation
  std::vector<std::string> enum_labels;  // when type is enumeration
};

/// Discrete-time state transition system: per step, outputs are computed
/// from inputs and states, then every state is replaced by its update
/// expression evaluated over current-step values.
struct ModelIR {
  std::string name;
  double step = 1.0;
  std::vector<VarDecl> inputs;
  std::vector<StateDecl> states;
  std::vector<OutputDecl> outputs;
  std::vector<ExprPtr> updates;  // aligned with states

  const VarDecl* find_input(const std::string& n) const {
    for (const auto& d : inputs)
      if (d.name == n) return &d;
    return nullptr;
  }
  const StateDecl* find_state(const std::string& n) const {
    for (const auto& d : states)
      if (d.decl.name == n) return &d;
    return nullptr;
  }
  const OutputDecl* find_output(const std::string& n) const {
    for (const auto& d : outputs)
      if (d.name == n) return &d;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Validation: name resolution, type checking, output acyclicity
// ---------------------------------------------------------------------------

namespace model_detail {

struct Type {
  KindTag tag = KindTag::real;
  const std::vector<std::string>* labels = nullptr;  // for enums

  bool operator==(const Type& o) const {
    if (tag != o.tag) return false;
    if (tag != KindTag::enumeration) return true;
    return labels == o.labels || (labels && o.labels && *labels == *o.labels);
  }
};

inline Type real_type() { return {KindTag::real, nullptr}; }
inline Type bool_type() { return {KindTag::boolean, nullptr}; }

inline const char* type_name(const Type& t) {
  switch (t.tag) {
    case KindTag::real: return "real";
    case KindTag::boolean: return "bool";
    case KindTag::enumeration: return "enum";
  }
  return "?";
}

class Checker {
public:
  explicit Checker(const ModelIR& m) : model_(m) {
    for (const auto& d : m.inputs) declare(d.name, type_of(d.kind));
    for (const auto& d : m.states) declare(d.decl.name, type_of(d.decl.kind));
    for (const auto& o : m.outputs) {
      if (vars_.count(o.name)) raise(Errc::parse_error, "duplicate variable '" + o.name + "'");
      output_index_[o.name] = outputs_seen_.size();
      outputs_seen_.push_back(o.name);
    }
  }

  /// Type of an expression; mutates ExLabel nodes are immutable, so label
  /// resolution is reported through `resolve` callbacks at parse time.
  Type check(const ExprPtr& e) {
    if (auto* n = std::get_if<ExNum>(&e->node)) {
      (void)n;
      return real_type();
    }
    if (std::get_if<ExBoolLit>(&e->node)) return bool_type();
    if (auto* v = std::get_if<ExVar>(&e->node)) return var_type(v->name);
    if (std::get_if<ExLabel>(&e->node))
      raise(Errc::type_mismatch, "enum label outside an enum comparison");
    if (auto* n = std::get_if<ExNeg>(&e->node)) {
      require(check(n->arg), real_type(), "unary minus");
      return real_type();
    }
    if (auto* n = std::get_if<ExNot>(&e->node)) {
      require(check(n->arg), bool_type(), "'!'");
      return bool_type();
    }
    if (auto* b = std::get_if<ExBinOp>(&e->node)) return check_bin(*b);
    const auto& c = std::get<ExCall>(e->node);
    return check_call(c);
  }

  void check_update_or_init(const std::string& state, const ExprPtr& e) {
    Type want = var_type(state);
    Type got = check(e);
    if (!(got == want))
      raise(Errc::type_mismatch, "update of '" + state + "' has type " + type_name(got) +
                                     ", expected " + type_name(want));
  }

private:
  Type type_of(const Kind& k) {
    switch (k.tag) {
      case KindTag::real: return real_type();
      case KindTag::boolean: return bool_type();
      case KindTag::enumeration: return {KindTag::enumeration, &k.labels};
    }
    return real_type();
  }

  void declare(const std::string& n, Type t) {
    if (vars_.count(n)) raise(Errc::parse_error, "duplicate variable '" + n + "'");
    vars_[n] = t;
  }

  Type var_type(const std::string& n) {
    auto it = vars_.find(n);
    if (it != vars_.end()) return it->second;
    auto oit = output_index_.find(n);
    if (oit != output_index_.end()) {
      const OutputDecl& o = model_.outputs[oit->second];
      // resolve through the output's expression (acyclicity is checked
      // separately, so recursion terminates for valid models)
      if (resolving_.count(n)) raise(Errc::cyclic_dependency, "output '" + n + "' depends on itself");
      resolving_.insert(n);
      Type t = check(o.expr);
      resolving_.erase(n);
      return t;
    }
    raise(Errc::parse_error, "unknown variable '" + n + "'");
  }

  void require(const Type& got, const Type& want, const char* what) {
    if (!(got == want))
      raise(Errc::type_mismatch,
            std::string(what) + " expects " + type_name(want) + ", got " + type_name(got));
  }

  Type check_bin(const ExBinOp& b) {
    switch (b.op) {
      case ExOp::add:
      case ExOp::sub:
      case ExOp::mul:
      case ExOp::div:
        require(check(b.lhs), real_type(), "arithmetic");
        require(check(b.rhs), real_type(), "arithmetic");
        return real_type();
      case ExOp::lt:
      case ExOp::le:
      case ExOp::gt:
      case ExOp::ge:
        require(check(b.lhs), real_type(), "comparison");
        require(check(b.rhs), real_type(), "comparison");
        return bool_type();
      case ExOp::eq:
      case ExOp::ne:
        return check_equality(b);
      case ExOp::and_:
      case ExOp::or_:
        require(check(b.lhs), bool_type(), "boolean operator");
        require(check(b.rhs), bool_type(), "boolean operator");
        return bool_type();
    }
    return real_type();
  }

  Type check_equality(const ExBinOp& b) {
    // enum var against label, enum var against same-typed enum var, or
    // real against real
    auto label_side = [&](const ExprPtr& e) { return std::get_if<ExLabel>(&e->node); };
    if (label_side(b.lhs) || label_side(b.rhs)) {
      const ExprPtr& var = label_side(b.lhs) ? b.rhs : b.lhs;
      const ExLabel* lab = label_side(b.lhs) ? label_side(b.lhs) : label_side(b.rhs);
      Type t = check(var);
      if (t.tag != KindTag::enumeration)
        raise(Errc::type_mismatch, "label '" + lab->label + "' compared with non-enum");
      if (lab->index < 0 || lab->index >= static_cast<int>(t.labels->size()) ||
          (*t.labels)[lab->index] != lab->label)
        raise(Errc::type_mismatch, "label '" + lab->label + "' not in the variable's enum");
      return bool_type();
    }
    Type l = check(b.lhs);
    Type r = check(b.rhs);
    if (!(l == r))
      raise(Errc::type_mismatch, std::string("'='/'!=' on mixed types ") + type_name(l) + " and " +
                                     type_name(r));
    if (l.tag == KindTag::boolean)
      raise(Errc::type_mismatch, "compare booleans with boolean operators, not '='");
    return bool_type();
  }

  Type check_call(const ExCall& c) {
    auto arity = [&](size_t n) {
      if (c.args.size() != n)
        raise(Errc::type_mismatch, std::string(ex_fn_name(c.fn)) + " takes " + std::to_string(n) +
                                       " argument(s)");
    };
    switch (c.fn) {
      case ExFn::ite: {
        arity(3);
        require(check(c.args[0]), bool_type(), "ite condition");
        Type a = check(c.args[1]);
        Type b = check(c.args[2]);
        if (!(a == b)) raise(Errc::type_mismatch, "ite branches have different types");
        return a;
      }
      case ExFn::sat:
        arity(3);
        for (const auto& a : c.args) require(check(a), real_type(), "sat");
        return real_type();
      case ExFn::min:
      case ExFn::max:
        arity(2);
        require(check(c.args[0]), real_type(), ex_fn_name(c.fn));
        require(check(c.args[1]), real_type(), ex_fn_name(c.fn));
        return real_type();
      default:
        arity(1);
        require(check(c.args[0]), real_type(), ex_fn_name(c.fn));
        return real_type();
    }
  }

  const ModelIR& model_;
  std::unordered_map<std::string, Type> vars_;
  std::unordered_map<std::string, size_t> output_index_;
  std::vector<std::string> outputs_seen_;
  std::unordered_set<std::string> resolving_;
};

inline void collect_vars(const ExprPtr& e, std::vector<std::string>& out) {
  if (auto* v = std::get_if<ExVar>(&e->node)) {
    out.push_back(v->name);
    return;
  }
  if (auto* n = std::get_if<ExNeg>(&e->node)) return collect_vars(n->arg, out);
  if (auto* n = std::get_if<ExNot>(&e->node)) return collect_vars(n->arg, out);
  if (auto* b = std::get_if<ExBinOp>(&e->node)) {
    collect_vars(b->lhs, out);
    collect_vars(b->rhs, out);
    return;
  }
  if (auto* c = std::get_if<ExCall>(&e->node))
    for (const auto& a : c->args) collect_vars(a, out);
}

}  // namespace model_detail

/// Check output acyclicity and type-correctness; fills in inferred output
/// types. Throws on any violation.
inline void validate_model(ModelIR& m) {
  if (!(m.step > 0)) raise(Errc::parse_error, "model step must be > 0");
  if (m.updates.size() != m.states.size())
    raise(Errc::parse_error, "every state needs exactly one update");
  for (const auto& d : m.inputs) {
    if (d.kind.tag == KindTag::real && (!d.kind.lo || !d.kind.hi))
      raise(Errc::parse_error, "input '" + d.name + "' needs a declared range");
  }

  // output dependency graph must be acyclic
  std::unordered_map<std::string, size_t> out_idx;
  for (size_t i = 0; i < m.outputs.size(); ++i) out_idx[m.outputs[i].name] = i;
  std::vector<int> mark(m.outputs.size(), 0);  // 0 new, 1 visiting, 2 done
  std::vector<size_t> order;
  auto dfs = [&](auto&& self, size_t i) -> void {
    if (mark[i] == 1)
      raise(Errc::cyclic_dependency, "output '" + m.outputs[i].name + "' is in a dependency cycle");
    if (mark[i] == 2) return;
    mark[i] = 1;
    std::vector<std::string> deps;
    model_detail::collect_vars(m.outputs[i].expr, deps);
    for (const auto& d : deps) {
      auto it = out_idx.find(d);
      if (it != out_idx.end()) self(self, it->second);
    }
    mark[i] = 2;
    order.push_back(i);
  };
  for (size_t i = 0; i < m.outputs.size(); ++i) dfs(dfs, i);

  model_detail::Checker checker(m);
  for (auto& o : m.outputs) {
    model_detail::Type t = checker.check(o.expr);
    o.type = t.tag;
    if (t.tag == KindTag::enumeration) o.enum_labels = *t.labels;
  }
  for (size_t i = 0; i < m.states.size(); ++i)
    checker.check_update_or_init(m.states[i].decl.name, m.updates[i]);
}

/// Output evaluation order (topological over output-to-output references).
inline std::vector<size_t> output_order(const ModelIR& m) {
  std::unordered_map<std::string, size_t> out_idx;
  for (size_t i = 0; i < m.outputs.size(); ++i) out_idx[m.outputs[i].name] = i;
  std::vector<int> mark(m.outputs.size(), 0);
  std::vector<size_t> order;
  auto dfs = [&](auto&& self, size_t i) -> void {
    if (mark[i]) return;
    mark[i] = 1;
    std::vector<std::string> deps;
    model_detail::collect_vars(m.outputs[i].expr, deps);
    for (const auto& d : deps) {
      auto it = out_idx.find(d);
      if (it != out_idx.end()) self(self, it->second);
    }
    order.push_back(i);
  };
  for (size_t i = 0; i < m.outputs.size(); ++i) dfs(dfs, i);
  return order;
}

// ---------------------------------------------------------------------------
// Expression evaluation over a name -> value environment
// ---------------------------------------------------------------------------

using Env = std::unordered_map<std::string, double>;

inline double eval_expr(const ExprPtr& e, const Env& env) {
  if (auto* n = std::get_if<ExNum>(&e->node)) return n->value;
  if (auto* b = std::get_if<ExBoolLit>(&e->node)) return b->value ? 1.0 : 0.0;
  if (auto* v = std::get_if<ExVar>(&e->node)) {
    auto it = env.find(v->name);
    if (it == env.end()) raise(Errc::unbound_signal, "unbound variable '" + v->name + "'");
    return it->second;
  }
  if (auto* l = std::get_if<ExLabel>(&e->node)) return static_cast<double>(l->index);
  if (auto* n = std::get_if<ExNeg>(&e->node)) return -eval_expr(n->arg, env);
  if (auto* n = std::get_if<ExNot>(&e->node)) return eval_expr(n->arg, env) != 0.0 ? 0.0 : 1.0;
  if (auto* b = std::get_if<ExBinOp>(&e->node)) {
    double l = eval_expr(b->lhs, env);
    auto r = [&] { return eval_expr(b->rhs, env); };
    switch (b->op) {
      case ExOp::add: return l + r();
      case ExOp::sub: return l - r();
      case ExOp::mul: return l * r();
      case ExOp::div: {
        double d = r();
        if (d == 0.0) raise(Errc::domain_error, "division by zero");
        return l / d;
      }
      case ExOp::lt: return l < r() ? 1.0 : 0.0;
      case ExOp::le: return l <= r() ? 1.0 : 0.0;
      case ExOp::gt: return l > r() ? 1.0 : 0.0;
      case ExOp::ge: return l >= r() ? 1.0 : 0.0;
      case ExOp::eq: return l == r() ? 1.0 : 0.0;
      case ExOp::ne: return l != r() ? 1.0 : 0.0;
      case ExOp::and_: return (l != 0.0 && r() != 0.0) ? 1.0 : 0.0;
      case ExOp::or_: return (l != 0.0 || r() != 0.0) ? 1.0 : 0.0;
    }
    raise(Errc::invalid_argument, "bad operator");
  }
  const auto& c = std::get<ExCall>(e->node);
  auto a = [&](size_t i) { return eval_expr(c.args[i], env); };
  switch (c.fn) {
    case ExFn::ite: return a(0) != 0.0 ? a(1) : a(2);
    case ExFn::sat: {
      double x = a(0), lo = a(1), hi = a(2);
      return std::min(hi, std::max(lo, x));
    }
    case ExFn::min: return std::min(a(0), a(1));
    case ExFn::max: return std::max(a(0), a(1));
    case ExFn::abs: return std::fabs(a(0));
    case ExFn::sqrt: {
      double x = a(0);
      if (x < 0) raise(Errc::domain_error, "sqrt of negative value");
      return std::sqrt(x);
    }
    case ExFn::sin: return std::sin(a(0));
    case ExFn::cos: return std::cos(a(0));
    case ExFn::exp: return std::exp(a(0));
    case ExFn::log: {
      double x = a(0);
      if (x <= 0) raise(Errc::domain_error, "log of non-positive value");
      return std::log(x);
    }
  }
  raise(Errc::invalid_argument, "bad builtin");
}

}  // namespace stlf
