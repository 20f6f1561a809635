#ifndef XORFOLD_EXPERIMENT_HPP
#define XORFOLD_EXPERIMENT_HPP

// Batch runs over (N, instance index) from a JSON config.
//
// Instance `index` at size N uses seed derive_seed(base_seed, N, index); the
// seed is written next to every output row so any run can be regenerated.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "xorfold/analysis.hpp"
#include "xorfold/errors.hpp"
#include "xorfold/greedy.hpp"
#include "xorfold/grids.hpp"
#include "xorfold/instance.hpp"
#include "xorfold/parallel.hpp"
#include "xorfold/protocols.hpp"
#include "xorfold/random.hpp"
#include "xorfold/simulator.hpp"

namespace xorfold {

inline constexpr int kSchemaVersion = 1;

enum class NcRuleKind { multiple, power };

struct NcRule {
  NcRuleKind kind = NcRuleKind::multiple;
  double c = 4.0;

  /// round(c N) or round(c N^(3/2)).
  int count(int n) const {
    const double v = kind == NcRuleKind::multiple ? c * n : c * std::pow(n, 1.5);
    return static_cast<int>(std::lround(v));
  }
  std::string label() const {
    return (kind == NcRuleKind::multiple ? "multiple:" : "power:") + format_number(c);
  }
};

struct ExperimentConfig {
  std::string protocol = "qaoa";  // a ProtocolKind name or "greedy"
  std::vector<int> ns;
  NcRule n_c_rule;
  double epsilon = 0.1;
  int instances = 2;
  std::uint64_t seed = 0;
  std::optional<double> A;
  double kappa = 1.3;
  std::optional<double> t_f_per_n;  // t_f = t_f_per_n * N; protocol default when absent
  std::optional<double> dt;
  std::optional<double> t_r_per_n;
  RampShape ramp = RampShape::sin2;
  int runtime_grid = 8;
  std::uint64_t restarts = 1000;
  double weight_exponent = 2.0;
  std::vector<double> q_grid = default_q_grid();
  std::vector<double> d_grid = default_d_grid();
  bool sqrt_fit = false;  // fit 2^(-b sqrt N); defaults on for the power rule
  std::string output;

  bool is_greedy() const { return protocol == "greedy"; }

  Schedule schedule_for(int n) const {
    const auto kind = protocol_from_string(protocol);
    Schedule s = default_schedule(kind, n, A.value_or(1.0));
    if (t_f_per_n) s.t_f = *t_f_per_n * n;
    if (dt) s.dt = *dt;
    if (is_tma(kind)) {
      s.kappa = kappa;
      if (t_r_per_n) s.t_r = *t_r_per_n * n;
    }
    s.ramp = ramp;
    return s;
  }

  /// Every check that can fail before work starts.
  void validate() const {
    if (ns.empty()) throw ConfigError("N list is empty");
    if (!(epsilon >= 0.0 && epsilon < 0.5)) throw ConfigError("epsilon must be in [0, 1/2)");
    if (instances < 2) throw ConfigError("at least 2 instances per N are needed for standard errors");
    if (!(n_c_rule.c > 0.0)) throw ConfigError("N_C rule coefficient must be positive");
    if (q_grid.empty() || d_grid.empty()) throw ConfigError("q and d grids must be non-empty");
    if (!std::is_sorted(q_grid.begin(), q_grid.end())) throw ConfigError("q grid must be sorted");
    const int cap = is_greedy() ? kMaxVariables : kMaxQubits;
    for (int n : ns) {
      if (n < 3 || n > cap) throw ConfigError("N = " + std::to_string(n) + " outside [3, " + std::to_string(cap) + "]");
      const int nc = n_c_rule.count(n);
      if (nc < 1 || static_cast<std::uint64_t>(nc) > triple_count(n))
        throw ConfigError("N_C = " + std::to_string(nc) + " invalid at N = " + std::to_string(n));
      if (2 * planted_satisfied_count(nc, epsilon) - nc <= 0)
        throw ConfigError("planted energy not below zero at N = " + std::to_string(n));
    }
    if (is_greedy()) {
      if (restarts < 1) throw ConfigError("restarts must be at least 1");
      if (!(weight_exponent > 0.0)) throw ConfigError("weight exponent must be positive");
      return;
    }
    ProtocolKind kind;
    try {
      kind = protocol_from_string(protocol);
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
    if ((is_fold_aqc(kind) || is_tma(kind)) && !A) throw ConfigError("protocol " + protocol + " needs A");
    if (runtime_grid < 1) throw ConfigError("runtime grid must be at least 1");
    for (int n : ns) {
      try {
        schedule_for(n).validate();
      } catch (const ParameterError& e) {
        throw ConfigError(std::string("schedule: ") + e.what());
      }
    }
  }
};

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    if (j.value("schema", 0) != kSchemaVersion) throw ConfigError("config schema must be 1");
    c.protocol = j.at("protocol").get<std::string>();
    c.ns = j.at("N").get<std::vector<int>>();
    const auto& rule = j.at("n_c_rule");
    const auto kind = rule.at("kind").get<std::string>();
    if (kind == "multiple") c.n_c_rule.kind = NcRuleKind::multiple;
    else if (kind == "power") c.n_c_rule.kind = NcRuleKind::power;
    else throw ConfigError("unknown N_C rule '" + kind + "' (multiple, power)");
    c.n_c_rule.c = rule.at("c").get<double>();
    c.sqrt_fit = c.n_c_rule.kind == NcRuleKind::power;
    c.epsilon = j.value("epsilon", c.epsilon);
    c.instances = j.value("instances", c.instances);
    c.seed = j.value("seed", c.seed);
    if (j.contains("A")) c.A = j.at("A").get<double>();
    c.kappa = j.value("kappa", c.kappa);
    if (j.contains("t_f_per_n")) c.t_f_per_n = j.at("t_f_per_n").get<double>();
    if (j.contains("dt")) c.dt = j.at("dt").get<double>();
    if (j.contains("t_r_per_n")) c.t_r_per_n = j.at("t_r_per_n").get<double>();
    if (j.contains("ramp")) {
      const auto r = j.at("ramp").get<std::string>();
      if (r == "sin2") c.ramp = RampShape::sin2;
      else if (r == "linear") c.ramp = RampShape::linear;
      else throw ConfigError("unknown ramp '" + r + "' (sin2, linear)");
    }
    c.runtime_grid = j.value("runtime_grid", c.runtime_grid);
    c.restarts = j.value("restarts", c.restarts);
    c.weight_exponent = j.value("weight_exponent", c.weight_exponent);
    if (j.contains("q_grid")) c.q_grid = j.at("q_grid").get<std::vector<double>>();
    if (j.contains("d_grid")) c.d_grid = j.at("d_grid").get<std::vector<double>>();
    c.sqrt_fit = j.value("sqrt_fit", c.sqrt_fit);
    c.output = j.value("output", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

inline nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["schema"] = kSchemaVersion;
  j["protocol"] = c.protocol;
  j["N"] = c.ns;
  j["n_c_rule"] = {{"kind", c.n_c_rule.kind == NcRuleKind::multiple ? "multiple" : "power"}, {"c", c.n_c_rule.c}};
  j["epsilon"] = c.epsilon;
  j["instances"] = c.instances;
  j["seed"] = c.seed;
  if (c.A) j["A"] = *c.A;
  j["kappa"] = c.kappa;
  if (c.t_f_per_n) j["t_f_per_n"] = *c.t_f_per_n;
  if (c.dt) j["dt"] = *c.dt;
  if (c.t_r_per_n) j["t_r_per_n"] = *c.t_r_per_n;
  j["ramp"] = c.ramp == RampShape::sin2 ? "sin2" : "linear";
  j["runtime_grid"] = c.runtime_grid;
  j["restarts"] = c.restarts;
  j["weight_exponent"] = c.weight_exponent;
  j["q_grid"] = c.q_grid;
  j["d_grid"] = c.d_grid;
  j["sqrt_fit"] = c.sqrt_fit;
  if (!c.output.empty()) j["output"] = c.output;
  return j;
}

/// Peak bytes one worker holds for an N-qubit run: state, raw energies,
/// cost table and (tma) the lowering table.
inline std::uint64_t worker_bytes(const ExperimentConfig& c, int n) {
  if (c.is_greedy()) return 64ULL * (c.restarts + 1) + 4096;
  const std::uint64_t dim = std::uint64_t{1} << n;
  const bool tma = is_tma(protocol_from_string(c.protocol));
  return dim * (sizeof(Amplitude) + sizeof(std::int32_t) + sizeof(double) + (tma ? sizeof(double) : 0));
}

struct ResourceEstimate {
  std::uint64_t required_bytes = 0;
  std::optional<std::uint64_t> available_bytes;
  unsigned threads = 1;
};

/// MemAvailable from /proc/meminfo, if readable.
inline std::optional<std::uint64_t> available_memory() {
  std::ifstream in("/proc/meminfo");
  std::string key;
  std::uint64_t kb = 0;
  std::string unit;
  while (in >> key >> kb >> unit)
    if (key == "MemAvailable:") return kb * 1024ULL;
  return std::nullopt;
}

inline ResourceEstimate estimate_resources(const ExperimentConfig& c, unsigned threads) {
  ResourceEstimate r;
  r.threads = std::max(1u, threads);
  const int max_n = *std::max_element(c.ns.begin(), c.ns.end());
  r.required_bytes = worker_bytes(c, max_n) * r.threads;
  r.available_bytes = available_memory();
  return r;
}

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RunSummary> runs;  // ordered by position in the N list, then instance index
  std::vector<int> instance_index;
  std::vector<AggregateRow> rows;
  std::map<CurveKey, std::optional<ScalingCurve>> curves;
  std::vector<std::string> warnings;
};

inline RunSummary run_one(const ExperimentConfig& c, int n, int index) {
  const std::uint64_t seed = derive_seed(c.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(index));
  const int nc = c.n_c_rule.count(n);
  const auto inst = generate_ppsp(n, nc, c.epsilon, seed);
  RunSummary r;
  r.protocol = c.protocol;
  r.N = n;
  r.N_C = nc;
  r.epsilon = c.epsilon;
  r.seed = seed;
  r.A = c.A.value_or(1.0);
  r.q_grid = c.q_grid;
  r.d_grid = c.d_grid;
  if (c.is_greedy()) {
    GreedyConfig g{c.weight_exponent, c.restarts, seed, 1};
    const auto res = restart_search(inst, g, c.q_grid);
    r.p_q = res.success;
    r.p_d.assign(c.d_grid.size(), 0.0);
    double e = 0.0;
    for (const auto& lm : res.minima_found) {
      const double w = static_cast<double>(lm.hits) / static_cast<double>(res.restarts);
      e += w * inst.normalize(lm.raw_energy);
      const int dist = hamming_distance(lm.string, *inst.planted());
      for (std::size_t i = 0; i < c.d_grid.size(); ++i)
        if (dist <= hamming_cutoff(c.d_grid[i], n)) r.p_d[i] += w;
    }
    r.expected_energy = e;
    return r;
  }
  const auto sched = c.schedule_for(n);
  std::optional<LoweringHamiltonian> lowering;
  if (is_tma(sched.kind)) lowering = default_lowering(inst, sched.kind, seed);
  const auto st = runtime_average(inst, sched, c.runtime_grid, lowering ? &*lowering : nullptr, c.q_grid, c.d_grid);
  r.p_q = st.p_q;
  r.p_d = st.p_d;
  r.expected_energy = st.expected_energy;
  return r;
}

/// Runs every (N, index) pair on `threads` workers. Results land in fixed
/// slots, so output is identical for any thread count.
inline ExperimentResult run_experiment(const ExperimentConfig& c, unsigned threads = 1, bool check_memory = true) {
  c.validate();
  if (check_memory) {
    const auto est = estimate_resources(c, threads);
    if (est.available_bytes && est.required_bytes > *est.available_bytes)
      throw ResourceError("experiment needs about " + std::to_string(est.required_bytes >> 20) + " MiB but only " +
                          std::to_string(*est.available_bytes >> 20) + " MiB are available");
  }
  ExperimentResult out;
  out.config = c;
  const std::size_t per_n = static_cast<std::size_t>(c.instances);
  const std::size_t total = c.ns.size() * per_n;
  out.runs.resize(total);
  out.instance_index.resize(total);
  parallel_for(total, threads, [&](std::size_t w) {
    const int n = c.ns[w / per_n];
    const int index = static_cast<int>(w % per_n);
    out.runs[w] = run_one(c, n, index);
    out.instance_index[w] = index;
  });
  out.rows = aggregate(out.runs);
  out.curves = fit_curves(out.rows, c.sqrt_fit, &out.warnings);
  return out;
}

// Round-trippable, so `analyze` can rebuild aggregates bit for bit.
inline std::string format_exact(double x) {
  if (x == 0.0) x = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_runs_csv(std::ostream& os, const ExperimentResult& r) {
  const auto& c = r.config;
  os << "protocol,N,N_C,epsilon,A,index,seed";
  for (double q : c.q_grid) os << ",P(" << level_label(Axis::q, q) << ')';
  for (double d : c.d_grid) os << ",P(" << level_label(Axis::d, d) << ')';
  os << ",expected_energy\n";
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    const auto& run = r.runs[i];
    os << run.protocol << ',' << run.N << ',' << run.N_C << ',' << format_number(run.epsilon) << ','
       << format_number(run.A) << ',' << r.instance_index[i] << ',' << run.seed;
    for (double p : run.p_q) os << ',' << format_exact(p);
    for (double p : run.p_d) os << ',' << format_exact(p);
    os << ',' << format_exact(run.expected_energy) << '\n';
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

/// Parses runs.csv back into summaries. The q and d grids come from the
/// config and must match the header.
inline ExperimentResult read_runs_csv(std::istream& is, const ExperimentConfig& c) {
  ExperimentResult r;
  r.config = c;
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("runs.csv is empty");
  const auto header = detail::split_csv_line(line);
  const std::size_t width = 7 + c.q_grid.size() + c.d_grid.size() + 1;
  if (header.size() != width) throw ConfigError("runs.csv header does not match the config grids");
  for (std::size_t i = 0; i < c.q_grid.size(); ++i)
    if (header[7 + i] != "P(" + level_label(Axis::q, c.q_grid[i]) + ")") throw ConfigError("runs.csv q columns do not match the config");
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != width) throw ConfigError("runs.csv line " + std::to_string(lineno) + " has the wrong width");
    try {
      RunSummary run;
      run.protocol = cells[0];
      run.N = std::stoi(cells[1]);
      run.N_C = std::stoi(cells[2]);
      run.epsilon = std::stod(cells[3]);
      run.A = std::stod(cells[4]);
      r.instance_index.push_back(std::stoi(cells[5]));
      run.seed = std::stoull(cells[6]);
      run.q_grid = c.q_grid;
      run.d_grid = c.d_grid;
      std::size_t k = 7;
      for (std::size_t i = 0; i < c.q_grid.size(); ++i) run.p_q.push_back(std::stod(cells[k++]));
      for (std::size_t i = 0; i < c.d_grid.size(); ++i) run.p_d.push_back(std::stod(cells[k++]));
      run.expected_energy = std::stod(cells[k]);
      r.runs.push_back(std::move(run));
    } catch (const std::logic_error&) {
      throw ConfigError("runs.csv line " + std::to_string(lineno) + " has a non-numeric field");
    }
  }
  r.rows = aggregate(r.runs);
  r.curves = fit_curves(r.rows, c.sqrt_fit, &r.warnings);
  return r;
}

inline nlohmann::ordered_json report_json(const ExperimentResult& r) {
  nlohmann::ordered_json j;
  j["schema"] = kSchemaVersion;
  j["config"] = to_json(r.config);
  std::vector<std::pair<double, Classification>> by_q;
  auto& curves = j["curves"] = nlohmann::ordered_json::array();
  for (const auto& [key, curve] : r.curves) {
    nlohmann::ordered_json cj;
    cj["protocol"] = key.protocol;
    cj["level"] = level_label(key.axis, key.level);
    if (curve) {
      cj["form"] = curve->fit.form.label();
      cj["fit_a"] = curve->fit.a;
      cj["fit_b"] = curve->fit.b;
      cj["residual"] = curve->fit.residual;
      cj["classification"] = to_string(curve->classification);
      cj["dropped_N"] = curve->dropped;
      // q = 1 is the ground state itself, not an approximation level.
      if (key.axis == Axis::q && key.level < 1.0) by_q.emplace_back(key.level, curve->classification);
    } else {
      cj["classification"] = "unfitted";
    }
    curves.push_back(cj);
  }
  const auto qa = approx_threshold(by_q);
  j["q_a"] = qa ? nlohmann::ordered_json(*qa) : nlohmann::ordered_json(nullptr);
  j["warnings"] = r.warnings;
  return j;
}

/// runs.csv, aggregate.csv and report.json under `dir`.
inline void write_outputs(const ExperimentResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "runs.csv");
    write_runs_csv(f, r);
  }
  {
    std::ofstream f(dir / "aggregate.csv");
    write_aggregate_csv(f, r.rows, r.curves, r.config.n_c_rule.label(), r.config.epsilon);
  }
  {
    std::ofstream f(dir / "report.json");
    f << report_json(r).dump(2) << '\n';
  }
}

}  // namespace xorfold

#endif  // XORFOLD_EXPERIMENT_HPP
