#ifndef XORFOLD_FIT_HPP
#define XORFOLD_FIT_HPP

// Least-squares fits of value(N) = a * N^power * 2^(-b x), x = N or sqrt(N).

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xorfold/errors.hpp"

namespace xorfold {

enum class DecayVariable { n, sqrt_n };

struct DecayForm {
  double prefactor_power = 0.0;  // 0: a 2^(-bx); 0.5: a sqrt(N) 2^(-bx); 1: a N 2^(-bx)
  DecayVariable variable = DecayVariable::n;

  std::string label() const {
    std::string shape = prefactor_power == 0.0 ? "a" : prefactor_power == 0.5 ? "a*sqrt(N)" : prefactor_power == 1.0 ? "a*N" : "a*N^" + std::to_string(prefactor_power);
    return shape + (variable == DecayVariable::n ? "*2^(-b*N)" : "*2^(-b*sqrt(N))");
  }
};

inline constexpr DecayForm kPlainExp{0.0, DecayVariable::n};
inline constexpr DecayForm kSqrtNExp{0.5, DecayVariable::n};
inline constexpr DecayForm kLinearNExp{1.0, DecayVariable::n};
inline constexpr DecayForm kPlainSqrtExp{0.0, DecayVariable::sqrt_n};

struct DecayFit {
  double a = 0.0;
  double b = 0.0;
  DecayForm form;
  double residual = 0.0;  // RMS of log2 residuals
  std::size_t points = 0;
};

struct DecayPoint {
  double n = 0.0;
  double value = 0.0;
};

/// Fit from log2 values directly; lets callers keep series that underflow a double.
inline DecayFit fit_decay_log2(std::span<const double> ns, std::span<const double> log2_values, DecayForm form) {
  if (ns.size() != log2_values.size()) throw ParameterError("fit inputs differ in length");
  if (ns.size() < 3) throw ParameterError("decay fit needs at least 3 points");
  const std::size_t k = ns.size();
  double sx = 0, sy = 0;
  std::vector<double> x(k), y(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(ns[i] > 0.0)) throw ParameterError("fit abscissa must be positive");
    if (!std::isfinite(log2_values[i])) throw DomainError("non-finite log value in fit");
    x[i] = form.variable == DecayVariable::n ? ns[i] : std::sqrt(ns[i]);
    y[i] = log2_values[i] - form.prefactor_power * std::log2(ns[i]);
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / static_cast<double>(k), my = sy / static_cast<double>(k);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw NumericError("decay fit needs at least two distinct N");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    ss += r * r;
  }
  DecayFit f;
  f.a = std::exp2(intercept);
  f.b = -slope;
  f.form = form;
  f.residual = std::sqrt(ss / static_cast<double>(k));
  f.points = k;
  return f;
}

inline DecayFit fit_decay(std::span<const DecayPoint> points, DecayForm form = kSqrtNExp) {
  std::vector<double> ns, ly;
  for (const auto& p : points) {
    if (!(p.value > 0.0)) throw DomainError("decay fit needs positive values");
    ns.push_back(p.n);
    ly.push_back(std::log2(p.value));
  }
  return fit_decay_log2(ns, ly, form);
}

/// Fit each candidate form and keep the one with the smallest residual.
inline DecayFit fit_decay_best_log2(std::span<const double> ns, std::span<const double> log2_values,
                                    std::span<const DecayForm> forms) {
  if (forms.empty()) throw ParameterError("no candidate fit forms");
  DecayFit best;
  best.residual = std::numeric_limits<double>::infinity();
  for (const auto& form : forms) {
    auto f = fit_decay_log2(ns, log2_values, form);
    if (f.residual < best.residual) best = f;
  }
  return best;
}

}  // namespace xorfold

#endif  // XORFOLD_FIT_HPP
