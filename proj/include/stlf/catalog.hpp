#pragma once

#include <string>
#include <vector>

#include "stlf/parse_model.hpp"
#include "stlf/parse_stl.hpp"
#include "stlf/simulate.hpp"

namespace stlf {

/// A built-in benchmark-style model: requirements, a default horizon, a
/// documented coarse input grid, and seeded-fault variants each violating
/// exactly one named requirement, with a recorded falsifying input.
struct CatalogFault {
  std::string id;
  std::string violates;  // requirement name
  ModelIR model;
  InputAssignment witness;
};

struct CatalogModel {
  std::string id;
  ModelIR model;
  std::vector<Requirement> requirements;
  SimConfig sim;
  std::vector<std::vector<double>> grid_values;  // per input, documented grid
  std::vector<CatalogFault> faults;

  /// Cartesian product of the documented per-input grid values, as
  /// constant assignments.
  std::vector<InputAssignment> grid() const {
    std::vector<InputAssignment> out;
    std::vector<size_t> idx(model.inputs.size(), 0);
    for (;;) {
      InputAssignment a;
      for (size_t i = 0; i < model.inputs.size(); ++i)
        a.values[model.inputs[i].name] = {grid_values[i][idx[i]]};
      out.push_back(std::move(a));
      size_t i = 0;
      for (; i < idx.size(); ++i) {
        if (++idx[i] < grid_values[i].size()) break;
        idx[i] = 0;
      }
      if (i == idx.size()) break;
    }
    return out;
  }
};

namespace catalog_detail {

// --- two-tanks-lite -------------------------------------------------------
// Two coupled tanks. Tank 1 is filled by a pump (plus an uncontrolled
// disturbance inflow) and drains into tank 2 through a transfer valve;
// tank 2 drains through a production valve and an emergency valve. Each
// tank has three level sensors; the controllers are small state machines
// with hysteresis. Parameters are chosen so that faults surface within a
// 30 s horizon at step 0.5.
inline const char* two_tanks_src = R"(
model two_tanks_lite;
step 0.5;

input disturbance: real[0, 1.5];
input pumpMode: enum{auto, forceOn, forceOff};
input valveOverride: bool;

state h1: real[0, 10] init 4;
state h2: real[0, 10] init 3;
state pumpPrev: bool init true;
state pValvePrev: bool init false;
state eValvePrev: bool init false;

output pos1H = 8;
output sensor1L = h1 >= 2;
output sensor1M = h1 >= 5;
output sensor1H = h1 >= 8;
output sensor2L = h2 >= 2;
output sensor2M = h2 >= 5;
output sensor2H = h2 >= 8;

# pump: fill when below the low sensor, stop above the high sensor
output pumpAuto = ite(!sensor1L, true, ite(sensor1H, false, pumpPrev));
output pump = ite(pumpMode == forceOn, true, ite(pumpMode == forceOff, false, pumpAuto));

# transfer valve tank1 -> tank2
output v12 = valveOverride || (sensor1M && !sensor2H);

# tank2 outflow valves; the emergency valve latches while above mid
output pValve = ite(sensor2M, true, ite(!sensor2L, false, pValvePrev));
output eValve = sensor2H || (sensor2M && eValvePrev);

h1' = sat(h1 + (ite(pump, 1.5, 0) + disturbance - ite(v12, 1.5, 0)) * dt, 0, 10);
h2' = sat(h2 + (ite(v12, 1.5, 0) - ite(pValve, 0.5, 0) - ite(eValve, 1.5, 0)) * dt, 0, 10);
pumpPrev' = pump;
pValvePrev' = pValve;
eValvePrev' = eValve;
)";

inline const char* two_tanks_reqs =
    "R1: G(h1 >= pos1H -> sensor1H = 1)\n"
    "R2: G(sensor2M = 1 && sensor2H = 0 && eValvePrev = 1 -> eValve = 1 && pValve = 1)\n"
    "R3: G(h2 <= 9.5)\n";

// --- tustin-lite ----------------------------------------------------------
// Switch-based saturating integrator with a rail indicator.
inline const char* tustin_src = R"(
model tustin_lite;
step 1;

input u: real[-2, 2];

state acc: real init 0;

output sum = acc + u * dt;
output out = acc;
output railed = abs(acc) >= 3;

acc' = ite(sum > 3, 3, ite(sum < -3, -3, sum));
)";

inline const char* tustin_reqs =
    "R1: G(out <= 3)\n"
    "R2: G(out >= -3)\n"
    "R3: G(abs(out) >= 3 -> railed = 1)\n";

// --- triplex-lite ---------------------------------------------------------
// Mid-value voter over three redundant sensor channels, with a per-channel
// miscompare counter that withdraws trust after three consecutive
// deviations beyond the limit.
inline const char* triplex_src = R"(
model triplex_lite;
step 1;

input a: real[-5, 5];
input b: real[-5, 5];
input c: real[-5, 5];

state cnt_a: real init 0;
state cnt_b: real init 0;
state cnt_c: real init 0;

output voted = max(min(a, b), min(max(a, b), c));
output dev_a = abs(a - voted);
output dev_b = abs(b - voted);
output dev_c = abs(c - voted);
output trust_a = cnt_a < 3;
output trust_b = cnt_b < 3;
output trust_c = cnt_c < 3;

cnt_a' = ite(dev_a > 2, cnt_a + 1, 0);
cnt_b' = ite(dev_b > 2, cnt_b + 1, 0);
cnt_c' = ite(dev_c > 2, cnt_c + 1, 0);
)";

inline const char* triplex_reqs =
    "R1: G(voted <= 5)\n"
    "R2: G(voted >= -5)\n"
    "R3: G(cnt_a >= 3 -> trust_a = 0)\n";

inline std::vector<Requirement> reqs_of(const char* text) {
  std::istringstream in(text);
  return parse_requirements(in);
}

inline std::string replace_line(const std::string& src, const std::string& from,
                                const std::string& to) {
  auto pos = src.find(from);
  if (pos == std::string::npos) raise(Errc::invalid_argument, "catalog fault seed not found");
  std::string out = src;
  out.replace(pos, from.size(), to);
  return out;
}

}  // namespace catalog_detail

/// Built-in models with requirements and seeded-fault variants.
inline std::vector<CatalogModel> builtin_models() {
  using namespace catalog_detail;
  std::vector<CatalogModel> out;

  {
    CatalogModel m;
    m.id = "two-tanks-lite";
    m.model = parse_model(two_tanks_src);
    m.requirements = reqs_of(two_tanks_reqs);
    m.sim = SimConfig{60};
    m.grid_values = {{0.0, 0.75, 1.5}, {0, 1, 2}, {0, 1}};

    CatalogFault f1;
    f1.id = "sensor1H-stuck";
    f1.violates = "R1";
    f1.model = parse_model(
        replace_line(two_tanks_src, "output sensor1H = h1 >= 8;", "output sensor1H = false;"));
    f1.witness = InputAssignment::constant(
        {{"disturbance", 1.0}, {"pumpMode", 1 /* forceOn */}, {"valveOverride", 0}});
    m.faults.push_back(std::move(f1));

    CatalogFault f2;
    f2.id = "evalve-latch-dropped";
    f2.violates = "R2";
    f2.model = parse_model(replace_line(two_tanks_src,
                                        "output eValve = sensor2H || (sensor2M && eValvePrev);",
                                        "output eValve = sensor2H;"));
    f2.witness = InputAssignment::constant(
        {{"disturbance", 1.0}, {"pumpMode", 1 /* forceOn */}, {"valveOverride", 0}});
    m.faults.push_back(std::move(f2));

    out.push_back(std::move(m));
  }

  {
    CatalogModel m;
    m.id = "tustin-lite";
    m.model = parse_model(tustin_src);
    m.requirements = reqs_of(tustin_reqs);
    m.sim = SimConfig{20};
    m.grid_values = {{-2.0, -1.0, 0.0, 1.0, 2.0}};

    CatalogFault f1;
    f1.id = "sat-upper-dropped";
    f1.violates = "R1";
    f1.model = parse_model(replace_line(tustin_src, "acc' = ite(sum > 3, 3, ite(sum < -3, -3, sum));",
                                        "acc' = ite(sum > 3, sum, ite(sum < -3, -3, sum));"));
    f1.witness = InputAssignment::constant({{"u", 2.0}});
    m.faults.push_back(std::move(f1));

    CatalogFault f2;
    f2.id = "rail-flag-inverted";
    f2.violates = "R3";
    f2.model = parse_model(
        replace_line(tustin_src, "output railed = abs(acc) >= 3;", "output railed = abs(acc) < 3;"));
    f2.witness = InputAssignment::constant({{"u", 2.0}});
    m.faults.push_back(std::move(f2));

    out.push_back(std::move(m));
  }

  {
    CatalogModel m;
    m.id = "triplex-lite";
    m.model = parse_model(triplex_src);
    m.requirements = reqs_of(triplex_reqs);
    m.sim = SimConfig{20};
    m.grid_values = {{-5.0, 0.0, 5.0}, {-5.0, 0.0, 5.0}, {-5.0, 0.0, 5.0}};

    CatalogFault f1;
    f1.id = "trust-a-stuck";
    f1.violates = "R3";
    f1.model = parse_model(
        replace_line(triplex_src, "output trust_a = cnt_a < 3;", "output trust_a = true;"));
    f1.witness = InputAssignment::constant({{"a", 5.0}, {"b", -5.0}, {"c", -5.0}});
    m.faults.push_back(std::move(f1));

    out.push_back(std::move(m));
  }

  return out;
}

inline const CatalogModel* find_catalog_model(const std::vector<CatalogModel>& cat,
                                              const std::string& id) {
  for (const auto& m : cat)
    if (m.id == id) return &m;
  return nullptr;
}

}  // namespace stlf
