#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "stlf/model.hpp"
#include "stlf/signal.hpp"

namespace stlf {

/// Per-input value schedule: one segment means a constant input, k > 1
/// means piecewise constant over k equal divisions of the horizon.
struct InputAssignment {
  std::map<std::string, std::vector<double>> values;

  static InputAssignment constant(std::map<std::string, double> vals) {
    InputAssignment a;
    for (auto& [k, v] : vals) a.values[k] = {v};
    return a;
  }

  /// Value of `name` at sample index i of a horizon of nsteps steps.
  double at(const std::string& name, long i, long nsteps) const {
    auto it = values.find(name);
    if (it == values.end()) raise(Errc::unbound_signal, "no value for input '" + name + "'");
    const auto& segs = it->second;
    if (segs.empty()) raise(Errc::invalid_argument, "empty segment list for '" + name + "'");
    if (segs.size() == 1) return segs[0];
    long k = static_cast<long>(segs.size());
    long seg = nsteps > 0 ? std::min<long>(k - 1, i * k / nsteps) : 0;
    return segs[static_cast<size_t>(seg)];
  }

  friend bool operator==(const InputAssignment& a, const InputAssignment& b) {
    return a.values == b.values;
  }
};

struct SimConfig {
  long nsteps = 1;  // horizon T = nsteps * step; trace has nsteps+1 samples
};

/// Check that an assignment covers every model input with in-range values.
inline void validate_assignment(const ModelIR& m, const InputAssignment& a) {
  for (const auto& d : m.inputs) {
    auto it = a.values.find(d.name);
    if (it == a.values.end()) raise(Errc::invalid_argument, "input '" + d.name + "' unassigned");
    for (double v : it->second) {
      switch (d.kind.tag) {
        case KindTag::real:
          if (v < *d.kind.lo || v > *d.kind.hi)
            raise(Errc::range_violation, "input '" + d.name + "' value out of range");
          break;
        case KindTag::boolean:
          if (v != 0.0 && v != 1.0)
            raise(Errc::range_violation, "input '" + d.name + "' must be 0/1");
          break;
        case KindTag::enumeration:
          if (v != std::floor(v) || v < 0 || v >= static_cast<double>(d.kind.labels.size()))
            raise(Errc::range_violation, "input '" + d.name + "' enum index out of range");
          break;
      }
    }
  }
}

/// Run the model for cfg.nsteps steps. The returned trace contains every
/// input, state and output and has nsteps+1 samples. Deterministic.
inline Trace simulate(const ModelIR& m, const InputAssignment& input, const SimConfig& cfg) {
  if (cfg.nsteps < 1) raise(Errc::invalid_argument, "nsteps must be >= 1");
  validate_assignment(m, input);

  const std::vector<size_t> out_order = output_order(m);
  const long n = cfg.nsteps;

  std::map<std::string, std::vector<double>> series;
  for (const auto& d : m.inputs) series[d.name].reserve(n + 1);
  for (const auto& s : m.states) series[s.decl.name].reserve(n + 1);
  for (const auto& o : m.outputs) series[o.name].reserve(n + 1);

  Env env;
  for (const auto& s : m.states) env[s.decl.name] = s.init;

  for (long i = 0; i <= n; ++i) {
    for (const auto& d : m.inputs) env[d.name] = input.at(d.name, i, n);
    for (size_t oi : out_order) env[m.outputs[oi].name] = eval_expr(m.outputs[oi].expr, env);

    for (const auto& d : m.inputs) series[d.name].push_back(env[d.name]);
    for (const auto& s : m.states) {
      double v = env[s.decl.name];
      if (s.decl.kind.tag == KindTag::real && s.decl.kind.lo &&
          (v < *s.decl.kind.lo || v > *s.decl.kind.hi))
        raise(Errc::range_violation, "state '" + s.decl.name + "' left its declared range at step " +
                                         std::to_string(i));
      series[s.decl.name].push_back(v);
    }
    for (const auto& o : m.outputs) series[o.name].push_back(env[o.name]);

    if (i == n) break;
    // next state from current-step values
    std::vector<double> next;
    next.reserve(m.states.size());
    for (size_t si = 0; si < m.states.size(); ++si) next.push_back(eval_expr(m.updates[si], env));
    for (size_t si = 0; si < m.states.size(); ++si) env[m.states[si].decl.name] = next[si];
  }

  Trace trace(m.step);
  auto add = [&](const std::string& name, const Kind& kind) {
    trace.add(Signal(name, kind, m.step, std::move(series[name])));
  };
  for (const auto& d : m.inputs) add(d.name, d.kind);
  for (const auto& s : m.states) {
    // declared state bounds were enforced above; keep them on the signal
    add(s.decl.name, s.decl.kind);
  }
  for (const auto& o : m.outputs) {
    Kind k = o.type == KindTag::boolean      ? Kind::boolean()
             : o.type == KindTag::enumeration ? Kind::enumeration(o.enum_labels)
                                              : Kind::real();
    add(o.name, k);
  }
  return trace;
}

}  // namespace stlf
