#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "stlf/monitor.hpp"
#include "stlf/rng.hpp"
#include "stlf/simulate.hpp"

namespace stlf {

// ---------------------------------------------------------------------------
// Search space
// ---------------------------------------------------------------------------

/// One searchable dimension: an input variable at one piecewise-constant
/// segment.
struct SearchDim {
  std::string input;
  int segment = 0;
  Kind kind;
};

struct SearchSpace {
  std::vector<SearchDim> dims;
  int segments = 1;

  size_t discrete_count() const {
    size_t n = 0;
    for (const auto& d : dims)
      if (d.kind.is_discrete()) ++n;
    return n;
  }
};

inline SearchSpace make_search_space(const ModelIR& m, int segments = 1) {
  if (segments < 1) raise(Errc::invalid_argument, "segment count must be >= 1");
  if (m.inputs.empty()) raise(Errc::invalid_argument, "model has no inputs to search over");
  SearchSpace s;
  s.segments = segments;
  for (const auto& d : m.inputs)
    for (int seg = 0; seg < segments; ++seg) s.dims.push_back({d.name, seg, d.kind});
  return s;
}

/// Flat coordinates of a candidate, dim-aligned with the space.
using Point = std::vector<double>;

inline InputAssignment to_assignment(const SearchSpace& space, const Point& p) {
  InputAssignment a;
  for (size_t i = 0; i < space.dims.size(); ++i) {
    auto& segs = a.values[space.dims[i].input];
    if (segs.empty()) segs.resize(space.segments, 0.0);
    segs[static_cast<size_t>(space.dims[i].segment)] = p[i];
  }
  return a;
}

inline Point random_point(const SearchSpace& space, Rng& rng) {
  Point p(space.dims.size(), 0.0);
  for (size_t i = 0; i < space.dims.size(); ++i) {
    const Kind& k = space.dims[i].kind;
    switch (k.tag) {
      case KindTag::real: p[i] = rng.uniform(*k.lo, *k.hi); break;
      case KindTag::boolean: p[i] = rng.uniform01() < 0.5 ? 1.0 : 0.0; break;
      case KindTag::enumeration:
        p[i] = static_cast<double>(rng.uniform_index(static_cast<long>(k.labels.size())));
        break;
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct SearchConfig {
  int iterations = 150;          // tweaks per hill-climb run
  int runs = 30;                 // independent runs per requirement
  double sigma_fraction = 0.1;   // sigma^2 = fraction * range width
  std::uint64_t base_seed = 1;
  bool stop_on_violation = true;

  void validate() const {
    if (iterations < 1) raise(Errc::invalid_argument, "iterations must be >= 1");
    if (runs < 1) raise(Errc::invalid_argument, "runs must be >= 1");
    if (!(sigma_fraction > 0.0) || sigma_fraction > 1.0)
      raise(Errc::invalid_argument, "sigma_fraction must be in (0, 1]");
  }
};

// ---------------------------------------------------------------------------
// Tweak operator
// ---------------------------------------------------------------------------

/// Gaussian convolution on real dimensions (zero-mean, variance
/// sigma_fraction times the range width, capped at the range bounds) and
/// a uniform re-draw of each discrete dimension with probability 1/dims.
inline Point tweak(const Point& p, const SearchSpace& space, const SearchConfig& cfg, Rng& rng) {
  Point out = p;
  const double flip_prob = 1.0 / static_cast<double>(space.dims.size());
  for (size_t i = 0; i < space.dims.size(); ++i) {
    const Kind& k = space.dims[i].kind;
    switch (k.tag) {
      case KindTag::real: {
        double width = *k.hi - *k.lo;
        double sigma = std::sqrt(cfg.sigma_fraction * width);
        double v = out[i] + rng.normal() * sigma;
        out[i] = std::min(*k.hi, std::max(*k.lo, v));
        break;
      }
      case KindTag::boolean:
        if (rng.uniform01() < flip_prob) out[i] = rng.uniform01() < 0.5 ? 1.0 : 0.0;
        break;
      case KindTag::enumeration:
        if (rng.uniform01() < flip_prob)
          out[i] = static_cast<double>(rng.uniform_index(static_cast<long>(k.labels.size())));
        break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fitness and hill climbing
// ---------------------------------------------------------------------------

/// Fitness of a test input against one requirement: the robustness of the
/// formula on the simulated trace at t = 0. Negative means the input is a
/// violation witness.
inline Robustness fitness(const ModelIR& m, const FormulaPtr& core_formula,
                          const InputAssignment& input, const SimConfig& sim,
                          const EvalOptions& opts = {}) {
  Trace tr = simulate(m, input, sim);
  return robustness(core_formula, tr, 0, opts);
}

struct SearchResult {
  Point best_point;
  InputAssignment best_input;
  Robustness best_fitness;
  int iterations_used = 0;
  std::vector<Robustness> history;           // fitness of each evaluated candidate
  std::vector<Robustness> accepted_history;  // fitness of the kept candidate over time
  bool violated = false;
  int violation_iteration = -1;  // index into history when fitness first went negative
  bool failed = false;
  std::string error;
};

/// Single-candidate local search: keep the current solution, tweak a
/// copy, move only on strict fitness improvement, stop when out of
/// iterations or (by default) as soon as the fitness goes negative.
inline SearchResult hill_climb(const ModelIR& m, const FormulaPtr& core_formula,
                               const SearchSpace& space, const SearchConfig& cfg,
                               const SimConfig& sim, std::uint64_t run_seed,
                               const EvalOptions& opts = {}) {
  cfg.validate();
  SearchResult res;
  Rng rng(run_seed);
  try {
    Point cur = random_point(space, rng);
    Robustness f_cur = fitness(m, core_formula, to_assignment(space, cur), sim, opts);
    res.history.push_back(f_cur);
    res.accepted_history.push_back(f_cur);

    auto note_violation = [&res](const Robustness& f, int at) {
      if (!res.violated && f < Robustness::zero()) {
        res.violated = true;
        res.violation_iteration = at;
      }
    };
    note_violation(f_cur, 0);

    for (int it = 1; it <= cfg.iterations; ++it) {
      if (cfg.stop_on_violation && f_cur < Robustness::zero()) break;
      Point cand = tweak(cur, space, cfg, rng);
      Robustness f_cand = fitness(m, core_formula, to_assignment(space, cand), sim, opts);
      res.history.push_back(f_cand);
      if (f_cand < f_cur) {
        cur = std::move(cand);
        f_cur = f_cand;
      }
      res.accepted_history.push_back(f_cur);
      note_violation(f_cur, it);
    }

    res.best_point = cur;
    res.best_input = to_assignment(space, cur);
    res.best_fitness = f_cur;
    res.iterations_used = static_cast<int>(res.history.size()) - 1;
  } catch (const Error& e) {
    res.failed = true;
    res.error = e.what();
  }
  return res;
}

}  // namespace stlf
