#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stlf/errors.hpp"

namespace stlf {

// ---------------------------------------------------------------------------
// Signal kinds
// ---------------------------------------------------------------------------

enum class KindTag { real, boolean, enumeration };

/// Value domain of a signal or variable. Real bounds are optional for
/// observed signals; model inputs always carry them.
struct Kind {
  KindTag tag = KindTag::real;
  std::optional<double> lo, hi;      // real bounds, when declared
  std::vector<std::string> labels;   // enum labels, index = stored value

  static Kind real() { return {KindTag::real, {}, {}, {}}; }
  static Kind real_range(double lo, double hi) {
    if (!(lo < hi)) raise(Errc::invalid_argument, "real range requires lo < hi");
    return {KindTag::real, lo, hi, {}};
  }
  static Kind boolean() { return {KindTag::boolean, {}, {}, {}}; }
  static Kind enumeration(std::vector<std::string> labels) {
    if (labels.empty()) raise(Errc::invalid_argument, "enum needs at least one label");
    return {KindTag::enumeration, {}, {}, std::move(labels)};
  }

  bool is_discrete() const { return tag != KindTag::real; }

  int enum_index(const std::string& label) const {
    for (size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return static_cast<int>(i);
    return -1;
  }

  friend bool operator==(const Kind& a, const Kind& b) {
    return a.tag == b.tag && a.lo == b.lo && a.hi == b.hi && a.labels == b.labels;
  }
};

// ---------------------------------------------------------------------------
// Signal / Trace
// ---------------------------------------------------------------------------

/// Uniformly sampled time series. Values are stored as doubles for every
/// kind: booleans as 0/1, enums as label index.
struct Signal {
  std::string name;
  Kind kind;
  double step = 1.0;
  std::vector<double> samples;

  Signal() = default;
  Signal(std::string name_, Kind kind_, double step_, std::vector<double> samples_)
      : name(std::move(name_)), kind(std::move(kind_)), step(step_), samples(std::move(samples_)) {
    validate();
  }

  void validate() const {
    if (!(step > 0)) raise(Errc::invalid_argument, "signal step must be > 0");
    if (samples.empty()) raise(Errc::invalid_argument, "signal '" + name + "' has no samples");
    for (double v : samples) {
      switch (kind.tag) {
        case KindTag::real:
          if (kind.lo && v < *kind.lo - 0.0)
            raise(Errc::range_violation, name + " sample below declared lo");
          if (kind.hi && v > *kind.hi)
            raise(Errc::range_violation, name + " sample above declared hi");
          break;
        case KindTag::boolean:
          if (v != 0.0 && v != 1.0) raise(Errc::invalid_argument, name + " boolean sample not 0/1");
          break;
        case KindTag::enumeration:
          if (v != std::floor(v) || v < 0 || v >= static_cast<double>(kind.labels.size()))
            raise(Errc::invalid_argument, name + " enum sample out of label range");
          break;
      }
    }
  }

  size_t size() const { return samples.size(); }
  double duration() const { return (static_cast<double>(samples.size()) - 1) * step; }
};

/// A set of signals over one shared time base.
class Trace {
public:
  Trace() = default;

  explicit Trace(double step) : step_(step) {
    if (!(step > 0)) raise(Errc::invalid_argument, "trace step must be > 0");
  }

  void add(Signal sig) {
    if (!signals_.empty()) {
      if (sig.step != step_) raise(Errc::invalid_argument, "signal step differs from trace step");
      if (sig.samples.size() != length())
        raise(Errc::invalid_argument, "signal length differs from trace length");
    } else {
      step_ = sig.step;
    }
    if (index_.count(sig.name)) raise(Errc::invalid_argument, "duplicate signal '" + sig.name + "'");
    index_[sig.name] = signals_.size();
    signals_.push_back(std::move(sig));
  }

  const Signal& at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) raise(Errc::unbound_signal, "no signal named '" + name + "'");
    return signals_[it->second];
  }

  bool has(const std::string& name) const { return index_.count(name) != 0; }

  const std::vector<Signal>& signals() const { return signals_; }
  double step() const { return step_; }
  size_t length() const { return signals_.empty() ? 0 : signals_.front().samples.size(); }
  bool empty() const { return signals_.empty(); }

  friend bool operator==(const Trace& a, const Trace& b) {
    if (a.step_ != b.step_ || a.signals_.size() != b.signals_.size()) return false;
    for (size_t i = 0; i < a.signals_.size(); ++i) {
      const Signal& sa = a.signals_[i];
      const Signal& sb = b.signals_[i];
      if (sa.name != sb.name || !(sa.kind == sb.kind) || sa.step != sb.step ||
          sa.samples != sb.samples)
        return false;
    }
    return true;
  }

private:
  double step_ = 1.0;
  std::vector<Signal> signals_;
  std::unordered_map<std::string, size_t> index_;
};

// ---------------------------------------------------------------------------
// Interval discretization
// ---------------------------------------------------------------------------

/// Closed real-time interval [lo, hi] attached to a temporal operator.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval checked(double lo, double hi) {
    if (lo < 0 || hi < 0) raise(Errc::malformed_interval, "interval bounds must be nonnegative");
    if (lo > hi) raise(Errc::malformed_interval, "interval lower bound exceeds upper bound");
    return {lo, hi};
  }

  friend bool operator==(const Interval& a, const Interval& b) {
    return a.lo == b.lo && a.hi == b.hi;
  }
};

/// Absent interval means "to the end of the trace".
using MaybeInterval = std::optional<Interval>;

struct TimeIndexWindow {
  long lo_index = 0;
  long hi_index = 0;
};

enum class WindowMode { strict, clamp };

namespace detail {
// a/step with a snap-to-integer tolerance before rounding, so that
// intervals like [0.2, 0.4] at step 0.1 discretize as intended.
inline long div_ceil(double a, double step) {
  double q = a / step;
  double r = std::nearbyint(q);
  if (std::fabs(q - r) <= 1e-9 * std::max(1.0, std::fabs(q))) return static_cast<long>(r);
  return static_cast<long>(std::ceil(q));
}
inline long div_floor(double a, double step) {
  double q = a / step;
  double r = std::nearbyint(q);
  if (std::fabs(q - r) <= 1e-9 * std::max(1.0, std::fabs(q))) return static_cast<long>(r);
  return static_cast<long>(std::floor(q));
}
}  // namespace detail

/// Discretize a temporal window anchored at sample t_index. Bounded
/// intervals round inward (ceil lower, floor upper); an absent interval
/// extends to the last sample. In strict mode a bounded window that
/// overruns the trace is an error; in clamp mode it is truncated.
inline TimeIndexWindow window_of(const MaybeInterval& interval, long t_index, long trace_len,
                                 double step, WindowMode mode = WindowMode::strict) {
  if (t_index < 0 || t_index >= trace_len)
    raise(Errc::invalid_argument, "t_index outside trace");
  if (!interval) return {t_index, trace_len - 1};

  if (interval->lo > interval->hi || interval->lo < 0)
    raise(Errc::malformed_interval, "bad interval");
  long lo = t_index + detail::div_ceil(interval->lo, step);
  long hi = t_index + detail::div_floor(interval->hi, step);
  if (mode == WindowMode::strict && hi >= trace_len)
    raise(Errc::insufficient_trace, "window end " + std::to_string(hi) +
                                        " past trace end " + std::to_string(trace_len - 1));
  hi = std::min(hi, trace_len - 1);
  if (lo > hi) raise(Errc::empty_window, "window contains no sample index");
  return {lo, hi};
}

}  // namespace stlf
