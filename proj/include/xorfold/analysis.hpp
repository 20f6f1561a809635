#ifndef XORFOLD_ANALYSIS_HPP
#define XORFOLD_ANALYSIS_HPP

// Per-run masses -> per-N means -> decay fits -> achievable ratio q_a.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "xorfold/errors.hpp"
#include "xorfold/fit.hpp"
#include "xorfold/grids.hpp"

namespace xorfold {

struct RunSummary {
  std::string protocol;
  int N = 0;
  int N_C = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  double A = 1.0;
  std::vector<double> q_grid;
  std::vector<double> p_q;
  std::vector<double> d_grid;
  std::vector<double> p_d;
  double expected_energy = 0.0;
};

enum class Axis { q, d };

/// Mean and standard error of one mass across the runs of a (protocol, N) group.
struct AggregateRow {
  std::string protocol;
  int N = 0;
  Axis axis = Axis::q;
  double level = 0.0;  // q or d
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

// Offsets from the first value keep identical inputs exact.
inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x - v.front();
  return v.front() + s / static_cast<double>(v.size());
}

/// Sample standard deviation over sqrt(count); zero for identical values.
inline double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

/// Unweighted mean and standard error per (protocol, N, q) and (protocol, N, d).
/// Rows come out sorted by protocol, N, axis, level, independent of input order.
inline std::vector<AggregateRow> aggregate(const std::vector<RunSummary>& runs) {
  if (runs.empty()) throw ParameterError("nothing to aggregate");
  std::map<std::tuple<std::string, int, int, double>, std::vector<double>> groups;
  std::map<std::pair<std::string, int>, std::size_t> sizes;
  for (const auto& r : runs) {
    if (r.p_q.size() != r.q_grid.size() || r.p_d.size() != r.d_grid.size()) throw ParameterError("run masses do not match their grids");
    ++sizes[{r.protocol, r.N}];
    for (std::size_t i = 0; i < r.q_grid.size(); ++i) groups[{r.protocol, r.N, 0, r.q_grid[i]}].push_back(r.p_q[i]);
    for (std::size_t i = 0; i < r.d_grid.size(); ++i) groups[{r.protocol, r.N, 1, r.d_grid[i]}].push_back(r.p_d[i]);
  }
  for (const auto& [key, count] : sizes)
    if (count < 2) throw ParameterError("aggregate needs at least 2 runs for " + key.first + " N=" + std::to_string(key.second));
  std::vector<AggregateRow> out;
  for (auto& [key, values] : groups) {
    // Sort so the floating sums do not depend on input order.
    std::sort(values.begin(), values.end());
    const auto& [protocol, n, axis, level] = key;
    out.push_back({protocol, n, axis == 0 ? Axis::q : Axis::d, level, mean_of(values), stderr_of(values), values.size()});
  }
  return out;
}

enum class Classification { non_decaying, decaying };

inline std::string to_string(Classification c) { return c == Classification::decaying ? "decaying" : "non-decaying"; }

inline constexpr double kDecayThreshold = 0.005;
inline constexpr double kMassFloor = 1e-12;

struct ScalingCurve {
  std::vector<double> ns;
  std::vector<double> values;
  DecayFit fit;
  Classification classification = Classification::non_decaying;
  std::vector<double> dropped;  // N values excluded for mass below the floor
};

/// Fits a 2^(-bN) (or a 2^(-b sqrt N) when sqrt_n is set) and calls the curve
/// decaying iff b > 0.005. Masses below 1e-12 are dropped and reported.
inline ScalingCurve classify_decay(const std::vector<double>& ns, const std::vector<double>& values, bool sqrt_n = false) {
  if (ns.size() != values.size()) throw ParameterError("curve abscissa and values differ in length");
  if (ns.size() < 4) throw ParameterError("classification needs at least 4 values of N");
  ScalingCurve c;
  std::vector<double> keep_n, keep_log;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (values[i] > kMassFloor) {
      keep_n.push_back(ns[i]);
      keep_log.push_back(std::log2(values[i]));
      c.ns.push_back(ns[i]);
      c.values.push_back(values[i]);
    } else {
      c.dropped.push_back(ns[i]);
    }
  }
  if (keep_n.empty()) throw NumericError("every point of the curve is below the mass floor");
  if (keep_n.size() < 3) throw NumericError("too few points above the mass floor to fit");
  c.fit = fit_decay_log2(keep_n, keep_log, sqrt_n ? kPlainSqrtExp : kPlainExp);
  c.classification = c.fit.b > kDecayThreshold ? Classification::decaying : Classification::non_decaying;
  return c;
}

/// Largest level whose curve does not decay; nullopt when every level decays.
inline std::optional<double> approx_threshold(const std::vector<std::pair<double, Classification>>& by_level) {
  std::optional<double> best;
  for (const auto& [level, cls] : by_level)
    if (cls == Classification::non_decaying && (!best || level > *best)) best = level;
  return best;
}

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (x == 0.0) x = 0.0;  // no "-0" in output
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

inline std::string level_label(Axis axis, double level) {
  return std::string(axis == Axis::q ? "q=" : "d=") + format_number(level);
}

/// Aggregated rows with the fit of each (protocol, axis, level) curve across N.
struct CurveKey {
  std::string protocol;
  Axis axis;
  double level;
  friend bool operator<(const CurveKey& a, const CurveKey& b) {
    return std::tie(a.protocol, a.axis, a.level) < std::tie(b.protocol, b.axis, b.level);
  }
};

inline std::map<CurveKey, std::optional<ScalingCurve>> fit_curves(const std::vector<AggregateRow>& rows, bool sqrt_n,
                                                                  std::vector<std::string>* warnings = nullptr) {
  std::map<CurveKey, std::pair<std::vector<double>, std::vector<double>>> series;
  for (const auto& r : rows) {
    auto& s = series[{r.protocol, r.axis, r.level}];
    s.first.push_back(r.N);
    s.second.push_back(r.mean);
  }
  std::map<CurveKey, std::optional<ScalingCurve>> out;
  for (const auto& [key, s] : series) {
    try {
      auto c = classify_decay(s.first, s.second, sqrt_n);
      if (warnings && !c.dropped.empty())
        warnings->push_back(key.protocol + " " + level_label(key.axis, key.level) + ": dropped " +
                            std::to_string(c.dropped.size()) + " point(s) below mass floor");
      out[key] = std::move(c);
    } catch (const std::exception& e) {
      if (warnings) warnings->push_back(key.protocol + " " + level_label(key.axis, key.level) + ": " + e.what());
      out[key] = std::nullopt;
    }
  }
  return out;
}

inline void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows,
                                const std::map<CurveKey, std::optional<ScalingCurve>>& curves,
                                const std::string& n_c_rule, double epsilon) {
  os << "protocol,N,N_C_rule,epsilon,q_or_d,mean,stderr,fit_a,fit_b,classification\n";
  for (const auto& r : rows) {
    const auto it = curves.find({r.protocol, r.axis, r.level});
    const bool fitted = it != curves.end() && it->second.has_value();
    os << r.protocol << ',' << r.N << ',' << n_c_rule << ',' << format_number(epsilon) << ','
       << level_label(r.axis, r.level) << ',' << format_number(r.mean) << ',' << format_number(r.std_error) << ','
       << (fitted ? format_number(it->second->fit.a) : "") << ',' << (fitted ? format_number(it->second->fit.b) : "")
       << ',' << (fitted ? to_string(it->second->classification) : "unfitted") << '\n';
  }
}

}  // namespace xorfold

#endif  // XORFOLD_ANALYSIS_HPP
