#ifndef XORFOLD_REPORTS_HPP
#define XORFOLD_REPORTS_HPP

// Canned theory computations: tunneling exponents for several p, the
// approximation-condition scan, the AQC overlap gap and the p = 2 profile.

#include <cmath>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "xorfold/analysis.hpp"
#include "xorfold/errors.hpp"
#include "xorfold/fit.hpp"
#include "xorfold/theory.hpp"
#include "xorfold/two_well_ed.hpp"

namespace xorfold {

struct PSpinCase {
  int p;
  double kappa;
};

/// The (p, kappa) pairs used for the tunneling comparison.
inline std::vector<PSpinCase> pspin_cases() { return {{2, 1.25}, {3, 1.25}, {4, 1.2}, {5, 1.1}, {7, 1.06}, {9, 1.03}}; }

inline std::vector<int> int_range(int lo, int hi, int step) {
  std::vector<int> v;
  for (int n = lo; n <= hi; n += step) v.push_back(n);
  return v;
}

/// b from sqrt(N) 2^(-bN) fitted to the perturbative splitting, N = 20..80 in steps of 4 (M = N/2 even).
inline DecayFit two_well_theory_fit(int p, double kappa, const std::vector<int>& ns = int_range(20, 80, 4)) {
  std::vector<double> x, y;
  for (int n : ns) {
    x.push_back(n);
    y.push_back(two_well_gap_theory(TwoWellParams::symmetric(n, p, kappa)).log_omega / std::numbers::ln2);
  }
  return fit_decay_log2(x, y, kSqrtNExp);
}

/// Same fit form on exact splittings, N = 10..40 in steps of 2.
inline DecayFit two_well_ed_fit(int p, double kappa, const std::vector<int>& ns = int_range(10, 40, 2)) {
  std::vector<double> x, y;
  for (int n : ns) {
    x.push_back(n);
    const double om = two_well_gap_ed(TwoWellParams::symmetric(n, p, kappa)).omega;
    if (!(om > 0.0)) throw NumericError("non-positive exact splitting at N = " + std::to_string(n));
    y.push_back(std::log2(om));
  }
  return fit_decay_log2(x, y, kSqrtNExp);
}

/// AQC overlap gap over N = 20..80 at kappa; the plain and sqrt(N)-prefactor
/// forms are both fitted and the one with the smaller residual is kept.
inline DecayFit aqc_gap_fit(double kappa, const std::vector<int>& ns = int_range(20, 80, 1)) {
  std::vector<double> x, y;
  for (int n : ns) {
    x.push_back(n);
    y.push_back(log_aqc_overlap_gap(n, kappa) / std::numbers::ln2);
  }
  const DecayForm forms[] = {kPlainExp, kSqrtNExp};
  return fit_decay_best_log2(x, y, forms);
}

/// p = 2 profile over kappa = 0.4..1.6 (13 points) and N = 10..60 step 2.
inline P2Profile p2_profile_default() {
  const auto ns = int_range(10, 60, 2);
  std::vector<double> ks;
  for (int i = 4; i <= 16; ++i) ks.push_back(i / 10.0);
  return fit_p2_profile(ns, ks);
}

/// Decay exponent of the p = 2 splitting in N (sqrt(N) prefactor form).
inline DecayFit p2_gap_fit(double kappa, const std::vector<int>& ns = int_range(10, 60, 2)) {
  std::vector<double> x, y;
  for (int n : ns) {
    x.push_back(n);
    y.push_back(p2_gap(n, kappa).log_omega / std::numbers::ln2);
  }
  return fit_decay_log2(x, y, kSqrtNExp);
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write_csv(std::ostream& os) const {
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
      os << '\n';
    }
  }
};

inline Table theory_report(const std::string& preset) {
  Table t;
  if (preset == "appendixA") {
    t.header = {"p", "kappa", "b_theory", "b_ed", "kappa_c"};
    for (const auto& c : pspin_cases()) {
      const double kc = c.p == 2 ? 2.0 : critical_field(c.p);
      t.rows.push_back({std::to_string(c.p), format_number(c.kappa), format_number(two_well_theory_fit(c.p, c.kappa).b),
                        format_number(two_well_ed_fit(c.p, c.kappa).b), format_number(kc)});
    }
  } else if (preset == "ptas") {
    t.header = {"b", "x_A", "A"};
    for (int i = 0; i <= 25; ++i) {
      const auto s = solve_ptas(i / 50.0);
      t.rows.push_back({format_number(s.b_input), format_number(s.x_A), format_number(s.A)});
    }
  } else if (preset == "aqc_gap") {
    const double kappa = 1.29;
    const auto fit = aqc_gap_fit(kappa);
    t.header = {"N", "kappa", "log2_omega0", "fit_form", "fit_a", "fit_b"};
    for (int n : int_range(20, 80, 1))
      t.rows.push_back({std::to_string(n), format_number(kappa), format_number(log_aqc_overlap_gap(n, kappa) / std::numbers::ln2),
                        fit.form.label(), format_number(fit.a), format_number(fit.b)});
  } else if (preset == "p2") {
    const auto prof = p2_profile_default();
    t.header = {"kappa", "growth", "fit_a", "fit_b", "omega_decay_b"};
    for (std::size_t i = 0; i < prof.kappas.size(); ++i)
      t.rows.push_back({format_number(prof.kappas[i]), format_number(prof.growth[i]), format_number(prof.a),
                        format_number(prof.b), format_number(p2_gap_fit(prof.kappas[i]).b)});
  } else {
    throw ParameterError("unknown theory preset '" + preset + "' (appendixA, ptas, aqc_gap, p2)");
  }
  return t;
}

}  // namespace xorfold

#endif  // XORFOLD_REPORTS_HPP
