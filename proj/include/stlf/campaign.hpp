#pragma once

#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "stlf/parse_stl.hpp"
#include "stlf/search.hpp"
#include "stlf/version.hpp"

namespace stlf {

// ---------------------------------------------------------------------------
// Report structures
// ---------------------------------------------------------------------------

struct RunRecord {
  int run = 0;
  std::uint64_t seed = 0;
  bool violated = false;
  bool failed = false;
  std::string error;
  Robustness best_fitness;
  InputAssignment best_input;
  int iterations_used = 0;
  int violation_iteration = -1;
  double wall_ms = 0.0;  // timing; excluded from determinism comparisons
};

struct RequirementReport {
  std::string name;
  std::string formula;
  int runs = 0;
  int violations = 0;  // runs whose best fitness is negative
  std::string notation;  // "v(m/runs)"
  std::vector<RunRecord> run_records;
};

struct CampaignReport {
  std::string model;
  std::uint64_t base_seed = 0;
  int runs = 0;
  int iterations = 0;
  double sigma_fraction = 0.1;
  long nsteps = 0;
  int segments = 1;
  std::vector<RequirementReport> requirements;

  int total_violated_requirements() const {
    int n = 0;
    for (const auto& r : requirements) n += r.violations > 0 ? 1 : 0;
    return n;
  }
};

/// Per-requirement notation: `v(m/runs)` with v = 1 when the requirement
/// was violated at least once, matching the campaign tables.
inline std::string requirement_notation(int violations, int runs) {
  return std::string(violations > 0 ? "1" : "0") + "(" + std::to_string(violations) + "/" +
         std::to_string(runs) + ")";
}

/// Model-level notation: requirements grouped by how many runs revealed
/// them, e.g. "2(30/30), 1(4/30)". "-" when nothing was violated.
inline std::string campaign_notation(const CampaignReport& report) {
  std::map<int, int, std::greater<int>> groups;  // m -> requirement count
  for (const auto& r : report.requirements)
    if (r.violations > 0) groups[r.violations]++;
  if (groups.empty()) return "-";
  std::string out;
  for (const auto& [m, count] : groups) {
    if (!out.empty()) out += ", ";
    out += std::to_string(count) + "(" + std::to_string(m) + "/" + std::to_string(report.runs) + ")";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Campaign execution
// ---------------------------------------------------------------------------

/// Run `cfg.runs` independent hill climbs per requirement with seeds
/// base_seed + run index. Units are independent; `jobs` > 1 executes them
/// on a small worker pool with results merged by index, so the report is
/// identical to a serial run.
inline CampaignReport falsify_campaign(const ModelIR& model,
                                       const std::vector<Requirement>& requirements,
                                       const SearchSpace& space, const SearchConfig& cfg,
                                       const SimConfig& sim, int jobs = 1,
                                       const EvalOptions& opts = {}) {
  cfg.validate();
  if (jobs < 1) jobs = 1;

  CampaignReport report;
  report.model = model.name;
  report.base_seed = cfg.base_seed;
  report.runs = cfg.runs;
  report.iterations = cfg.iterations;
  report.sigma_fraction = cfg.sigma_fraction;
  report.nsteps = sim.nsteps;
  report.segments = space.segments;
  report.requirements.resize(requirements.size());

  struct Unit {
    size_t req;
    int run;
  };
  std::vector<Unit> units;
  for (size_t q = 0; q < requirements.size(); ++q)
    for (int r = 0; r < cfg.runs; ++r) units.push_back({q, r});

  for (size_t q = 0; q < requirements.size(); ++q) {
    auto& rr = report.requirements[q];
    rr.name = requirements[q].name;
    rr.formula = requirements[q].text;
    rr.runs = cfg.runs;
    rr.run_records.resize(cfg.runs);
  }

  auto work = [&](const Unit& u) {
    const Requirement& rq = requirements[u.req];
    std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(u.run);
    auto t0 = std::chrono::steady_clock::now();
    SearchResult sr = hill_climb(model, rq.core, space, cfg, sim, seed, opts);
    auto t1 = std::chrono::steady_clock::now();

    RunRecord rec;
    rec.run = u.run;
    rec.seed = seed;
    rec.failed = sr.failed;
    rec.error = sr.error;
    if (!sr.failed) {
      rec.violated = sr.violated;
      rec.best_fitness = sr.best_fitness;
      rec.best_input = sr.best_input;
      rec.iterations_used = sr.iterations_used;
      rec.violation_iteration = sr.violation_iteration;
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    report.requirements[u.req].run_records[u.run] = std::move(rec);
  };

  if (jobs == 1) {
    for (const Unit& u : units) work(u);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= units.size()) return;
        work(units[i]);
      }
    };
    std::vector<std::thread> pool;
    int n = std::min<int>(jobs, static_cast<int>(units.size()));
    pool.reserve(n);
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (auto& rr : report.requirements) {
    rr.violations = 0;
    for (const auto& rec : rr.run_records)
      if (!rec.failed && rec.violated) ++rr.violations;
    rr.notation = requirement_notation(rr.violations, rr.runs);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const Robustness& r) {
  return nlohmann::json{{"value", r.value}, {"eps", r.eps}};
}

inline nlohmann::json to_json(const InputAssignment& a) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, segs] : a.values) j[name] = segs;
  return j;
}

inline InputAssignment input_assignment_from_json(const nlohmann::json& j) {
  InputAssignment a;
  for (auto it = j.begin(); it != j.end(); ++it)
    a.values[it.key()] = it.value().get<std::vector<double>>();
  return a;
}

/// Full campaign report. `with_timing = false` yields the deterministic
/// core used by the serial-vs-parallel equality checks.
inline nlohmann::json to_json(const CampaignReport& rep, bool with_timing = true) {
  nlohmann::json j;
  j["tool"] = "stlf";
  j["version"] = version_string();
  j["model"] = rep.model;
  j["seed"] = rep.base_seed;
  j["runs"] = rep.runs;
  j["iterations"] = rep.iterations;
  j["sigma_fraction"] = rep.sigma_fraction;
  j["nsteps"] = rep.nsteps;
  j["segments"] = rep.segments;
  j["notation"] = campaign_notation(rep);
  j["requirements"] = nlohmann::json::array();
  for (const auto& rr : rep.requirements) {
    nlohmann::json rj;
    rj["name"] = rr.name;
    rj["formula"] = rr.formula;
    rj["runs"] = rr.runs;
    rj["violations"] = rr.violations;
    rj["notation"] = rr.notation;
    rj["witnesses"] = nlohmann::json::array();
    rj["errors"] = nlohmann::json::array();
    if (with_timing) rj["wall_ms"] = nlohmann::json::array();
    for (const auto& rec : rr.run_records) {
      if (with_timing) rj["wall_ms"].push_back(rec.wall_ms);
      if (rec.failed) {
        rj["errors"].push_back({{"run", rec.run}, {"error", rec.error}});
        continue;
      }
      if (rec.violated)
        rj["witnesses"].push_back({{"run", rec.run},
                                   {"seed", rec.seed},
                                   {"input", to_json(rec.best_input)},
                                   {"fitness", to_json(rec.best_fitness)},
                                   {"iteration", rec.violation_iteration}});
    }
    j["requirements"].push_back(std::move(rj));
  }
  return j;
}

/// CSV summary, one row per requirement.
inline std::string campaign_csv(const CampaignReport& rep) {
  std::ostringstream out;
  out << "model,requirement,formula,runs,violations,notation\n";
  for (const auto& rr : rep.requirements) {
    std::string formula = rr.formula;
    for (auto& c : formula)
      if (c == ',') c = ';';
    out << rep.model << ',' << rr.name << ',' << formula << ',' << rr.runs << ','
        << rr.violations << ',' << rr.notation << '\n';
  }
  return out.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) raise(Errc::parse_error, "cannot write '" + path + "'");
  out << text;
}

}  // namespace stlf
