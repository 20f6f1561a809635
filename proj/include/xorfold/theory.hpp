#ifndef XORFOLD_THEORY_HPP
#define XORFOLD_THEORY_HPP

// Resummed perturbation theory for p-spin tunneling.
//
// Energies are normalized so a classical ground state sits at -N and the
// transverse field is kappa * sum X. Every series is accumulated as natural
// logs; functions named log_* return ln of the quantity.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xorfold/errors.hpp"
#include "xorfold/fit.hpp"

namespace xorfold {

inline double log_factorial(double n) { return std::lgamma(n + 1.0); }
inline double log_binomial(double n, double k) { return log_factorial(n) - log_factorial(k) - log_factorial(n - k); }

/// ln(sum exp(t)) without overflow. Empty input gives -inf.
inline double log_sum_exp(std::span<const double> terms) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double t : terms) mx = std::max(mx, t);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - mx);
  return mx + std::log(s);
}

/// Mean energy x random flips away from a ground state of a p-body problem.
inline double avg_flip_energy(double x, int n, int p) {
  if (!(x >= 0.0 && x <= n)) throw ParameterError("flip count must be in [0, N]");
  if (n <= 0) throw ParameterError("N must be positive");
  return -n * std::pow(1.0 - 2.0 * x / n, p);
}

/// Smallest positive root of kappa = 1 + kappa^2/(2p) + kappa^4/(8p^3).
///
/// Scans (0, 4) for the first sign change and bisects it. For p = 2 the
/// quartic side stays above kappa everywhere, so there is no root.
inline double critical_field(int p) {
  if (p < 2) throw ParameterError("p must be at least 2");
  const double pd = p;
  auto f = [pd](double k) { return 1.0 + k * k / (2 * pd) + std::pow(k, 4) / (8 * pd * pd * pd) - k; };
  constexpr int kScan = 40000;
  double lo = 0.0, flo = f(0.0);
  for (int i = 1; i <= kScan; ++i) {
    const double hi = 4.0 * i / kScan;
    const double fhi = f(hi);
    if ((flo > 0) != (fhi > 0) || fhi == 0.0) {
      double a = lo, b = hi;
      for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
        const double c = 0.5 * (a + b);
        if ((f(a) > 0) != (f(c) > 0)) b = c;
        else a = c;
      }
      return 0.5 * (a + b);
    }
    lo = hi;
    flo = fhi;
  }
  throw NumericError("no critical field in (0, 4) for p = " + std::to_string(p));
}

/// ln Omega_0 for AQC on a p-body problem (p = 3 by default):
/// 2^(-N/2) (1 + sum_m kappa^m C(N,m) m! prod_{n<=m} 1/E~(n)), E~(n) = avg_flip_energy(n) + N.
inline double log_aqc_overlap_gap(int n, double kappa, int p = 3) {
  if (!(kappa > 0.0)) throw ParameterError("kappa must be positive");
  if (n < 0) throw ParameterError("N must be non-negative");
  std::vector<double> terms{0.0};
  double log_prod = 0.0;
  for (int m = 1; m <= n; ++m) {
    const double e = avg_flip_energy(m, n, p) + n;
    if (!(e > 0.0)) throw DomainError("flip cost non-positive at m = " + std::to_string(m));
    log_prod += std::log(e);
    terms.push_back(m * std::log(kappa) + log_factorial(n) - log_factorial(n - m) - log_prod);
  }
  return -0.5 * n * std::numbers::ln2 + log_sum_exp(terms);
}

struct TwoWellParams {
  int N = 0;
  int M = 0;  // primary spins; conventionally N/2
  int p = 3;
  double kappa = 1.0;

  static TwoWellParams symmetric(int n, int p, double kappa) { return {n, n / 2, p, kappa}; }
};

namespace detail {

// Normalized magnetizations of the two wells after m primary and n secondary flips.
inline std::pair<double, double> well_overlaps(double m, double n, const TwoWellParams& w) {
  const double N = w.N;
  return {1.0 - 2.0 * (m + n) / N, (N - 2.0 * w.M + 2.0 * (m - n)) / N};
}

// a^k with integer k, kept exact for negative bases.
inline double ipow(double a, int k) { return k == 0 ? 1.0 : std::pow(a, k); }

}  // namespace detail

/// E(m, n) = -N [ (1 - 2(m+n)/N)^p + ((N - 2M + 2(m-n))/N)^p ].
inline double bare_two_well_energy(double m, double n, const TwoWellParams& w) {
  if (!(m + n >= 0 && m + n <= w.N)) throw ParameterError("flip counts out of range");
  const auto [a, b] = detail::well_overlaps(m, n, w);
  return -w.N * (detail::ipow(a, w.p) + detail::ipow(b, w.p));
}

/// Dressed cost u_{m,n} before any regularization:
/// E(m,n) + N(1 + kappa^2/2p) - kappa^2 (M-2m)/dE/dm - kappa^2 (N-M-2n)/dE/dn,
/// with derivatives taken analytically. A 0/0 ratio is resolved by
/// l'Hopital; a lone vanishing derivative has no finite value.
inline double raw_flip_cost(double m, double n, const TwoWellParams& w) {
  const int p = w.p;
  const double N = w.N;
  const double k2 = w.kappa * w.kappa;
  const auto [a, b] = detail::well_overlaps(m, n, w);
  const double dm = 2.0 * p * (detail::ipow(a, p - 1) - detail::ipow(b, p - 1));
  const double dn = 2.0 * p * (detail::ipow(a, p - 1) + detail::ipow(b, p - 1));
  const double d2m = 2.0 * p * (p - 1) * (-(2.0 / N) * detail::ipow(a, p - 2) - (2.0 / N) * detail::ipow(b, p - 2));
  const double d2n = 2.0 * p * (p - 1) * (-(2.0 / N)) * (detail::ipow(a, p - 2) + detail::ipow(b, p - 2));
  auto ratio = [](double num, double den, double den2) {
    constexpr double tiny = 1e-12;
    if (std::abs(den) > tiny) return num / den;
    if (std::abs(num) > tiny) throw DomainError("vanishing flip-cost derivative without cancellation");
    if (std::abs(den2) <= tiny) throw DomainError("degenerate flip-cost derivative");
    return -2.0 / den2;
  };
  const double rm = ratio(w.M - 2.0 * m, dm, d2m);
  const double rn = ratio(N - w.M - 2.0 * n, dn, d2n);
  return bare_two_well_energy(m, n, w) + N * (1.0 + k2 / (2.0 * p)) - k2 * rm - k2 * rn;
}

/// u_{m,0} and u_{m,1} for m = 0..M/2 as used in the tunneling sums.
///
/// For p >= 4 the primary costs stop growing past their maximizer m_c over
/// integer m in [1, M/2], and a secondary insertion never lowers a cost:
/// u_{m,1} >= u_{m,0}.
struct FlipCostTable {
  std::vector<double> u0;
  std::vector<double> u1;
};

inline FlipCostTable flip_cost_table(const TwoWellParams& w) {
  if (w.M < 2 || w.M % 2 != 0) throw ParameterError("M must be even and at least 2");
  if (w.M > w.N) throw ParameterError("M must not exceed N");
  if (!(w.kappa > 0.0)) throw ParameterError("kappa must be positive");
  const int h = w.M / 2;
  FlipCostTable t;
  for (int m = 0; m <= h; ++m) {
    t.u0.push_back(raw_flip_cost(m, 0, w));
    t.u1.push_back(w.N > w.M ? raw_flip_cost(m, 1, w) : std::numeric_limits<double>::quiet_NaN());
  }
  if (w.p >= 4) {
    int mc = 1;
    for (int m = 2; m <= h; ++m)
      if (t.u0[m] > t.u0[mc]) mc = m;
    for (int m = mc; m <= h; ++m) t.u0[m] = t.u0[mc];
    if (w.N > w.M)
      for (int m = 0; m <= h; ++m) t.u1[m] = std::max(t.u1[m], t.u0[m]);
  }
  return t;
}

/// u_{m,n} with the p >= 4 regularization applied where it is defined
/// (n in {0, 1}, m <= M/2).
inline double dressed_flip_cost(int m, int n, const TwoWellParams& w) {
  if (w.p >= 4 && (n == 0 || n == 1) && m >= 0 && m <= w.M / 2 && w.M % 2 == 0 && w.M >= 2) {
    const auto t = flip_cost_table(w);
    return n == 0 ? t.u0[m] : t.u1[m];
  }
  return raw_flip_cost(m, n, w);
}

struct SecondaryFactors {
  double log_xi = 0.0;    // ln xi_{M/2} (without the common (M/2)! kappa^(M/2))
  double log_xi_s = 0.0;  // ln xi^s_{M/2} on the same footing
  double gamma_t = 1.0;
  double gamma_r = 1.0;
};

/// gamma_T = 1 + (xi^s/xi)^2 and gamma_R = 1 + (kappa/u_{0,1})^2 from cost arrays indexed 0..M/2.
///
/// The insertion sum runs over n = 0..M/2, so the secondary flip may also
/// come first. With u_{k,1} = u_{k,0} + U for a constant U this makes
/// gamma_T equal gamma_R exactly.
inline SecondaryFactors secondary_factors(std::span<const double> u0, std::span<const double> u1, double kappa) {
  if (u0.size() != u1.size() || u0.size() < 2) throw ParameterError("cost arrays must match and cover M/2 >= 1");
  const std::size_t h = u0.size() - 1;
  auto lg = [](double u) {
    if (!(u > 0.0)) throw DomainError("non-positive flip cost in a denominator (kappa too large?)");
    return std::log(u);
  };
  SecondaryFactors f;
  for (std::size_t k = 1; k <= h; ++k) f.log_xi -= lg(u0[k]);
  std::vector<double> suffix(h + 2, 0.0);  // suffix[n] = sum_{k=n}^{h} ln u1[k]
  for (std::size_t k = h + 1; k-- > 0;) suffix[k] = suffix[k + 1] + lg(u1[k]);
  std::vector<double> terms;
  double prefix = 0.0;
  for (std::size_t n = 0; n <= h; ++n) {
    if (n >= 1) prefix += lg(u0[n]);
    terms.push_back(-prefix - suffix[n]);
  }
  f.log_xi_s = std::log(kappa) + log_sum_exp(terms);
  f.gamma_t = 1.0 + std::exp(2.0 * (f.log_xi_s - f.log_xi));
  f.gamma_r = 1.0 + std::pow(kappa / u1[0], 2);
  return f;
}

struct TwoWellTheory {
  double log_omega = 0.0;    // ln Omega_0
  double log_primary = 0.0;  // ln of the primary-spin splitting before normalization
  double log_norm = 0.0;     // ln N^(p)
  double gamma_t = 1.0;
  double gamma_r = 1.0;
};

/// Tunnel splitting between two p-spin wells M flips apart.
inline TwoWellTheory two_well_gap_theory(const TwoWellParams& w) {
  const auto t = flip_cost_table(w);
  const int h = w.M / 2;
  const double lk = std::log(w.kappa);
  auto lg = [](double u) {
    if (!(u > 0.0)) throw DomainError("non-positive flip cost in a denominator (kappa too large?)");
    return std::log(u);
  };
  TwoWellTheory r;
  double sum_inner = 0.0;  // sum_{k=1}^{h-1} ln u_{k,0}
  for (int k = 1; k < h; ++k) sum_inner += lg(t.u0[k]);
  r.log_primary = w.M * lk + log_binomial(w.M, h) - lg(t.u0[h]) + 2.0 * (log_factorial(h) - sum_inner);

  std::vector<double> norm_terms{0.0};
  double s = 0.0;
  for (int k = 1; k <= h; ++k) {
    s += lg(t.u0[k]);
    norm_terms.push_back(log_binomial(w.M, k) + 2.0 * (k * lk + log_factorial(k) - s));
  }
  r.log_norm = -log_sum_exp(norm_terms);
  r.log_omega = r.log_primary + r.log_norm;

  if (w.N > w.M) {
    const auto f = secondary_factors(t.u0, t.u1, w.kappa);
    r.gamma_t = f.gamma_t;
    r.gamma_r = f.gamma_r;
    r.log_omega += (w.N - w.M) * (std::log(f.gamma_t) - std::log(f.gamma_r));
  }
  return r;
}

/// Fully connected p = 2 ferromagnet: ln Omega_0 and ln w with flip costs
/// eps_j = 4 j (1 - j/N).
struct P2Gap {
  double log_omega = 0.0;
  double log_w = 0.0;
};

inline P2Gap p2_gap(int n, double kappa) {
  if (n < 2 || n % 2 != 0) throw ParameterError("N must be even and at least 2");
  if (!(kappa >= 0.0 && kappa < 2.0)) throw ParameterError("kappa must be in [0, 2)");
  P2Gap g;
  std::vector<double> terms{0.0};
  if (kappa > 0.0) {
    const double lk = std::log(kappa);
    double s = 0.0;
    for (int k = 1; k <= n / 2; ++k) {
      s += std::log(4.0 * k * (1.0 - static_cast<double>(k) / n));
      terms.push_back(log_binomial(n, k) + 2.0 * (k * lk + log_factorial(k) - s));
    }
  }
  g.log_w = 0.5 * log_sum_exp(terms);
  g.log_omega = kappa > 0.0 ? 0.5 * std::log(n / (2.0 * std::numbers::pi)) + n * std::log(kappa) - 2.0 * g.log_w +
                                  n * (1.0 - 2.0 * std::numbers::ln2)
                            : -std::numeric_limits<double>::infinity();
  return g;
}

/// w^2 ~ (1 + a kappa^b)^N: slope of ln w^2 in N per kappa, then a power-law
/// fit of exp(slope) - 1 against kappa on log axes.
struct P2Profile {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> kappas;
  std::vector<double> growth;  // exp(slope) - 1 per kappa
};

inline P2Profile fit_p2_profile(std::span<const int> ns, std::span<const double> kappas) {
  if (ns.size() < 2 || kappas.size() < 2) throw ParameterError("p2 profile needs at least two N and two kappa");
  P2Profile out;
  std::vector<double> lx, ly;
  for (double k : kappas) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int n : ns) {
      const double y = 2.0 * p2_gap(n, k).log_w;
      sx += n;
      sy += y;
      sxx += static_cast<double>(n) * n;
      sxy += n * y;
    }
    const double c = static_cast<double>(ns.size());
    const double slope = (c * sxy - sx * sy) / (c * sxx - sx * sx);
    const double gr = std::expm1(slope);
    if (!(gr > 0.0)) throw NumericError("non-positive growth in p2 profile");
    out.kappas.push_back(k);
    out.growth.push_back(gr);
    lx.push_back(std::log(k));
    ly.push_back(std::log(gr));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(ly.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  out.b = sxy / sxx;
  out.a = std::exp(my - out.b * mx);
  return out;
}

struct PtasSolution {
  double b_input = 0.0;
  double x_A = 0.0;
  double A = 1.0;
};

/// Left side of the balance between target-state entropy and the per-state
/// tunneling decay; zero where success stops decaying exponentially.
inline double ptas_balance(double x, double b) {
  const double l2 = std::numbers::ln2;
  const double entropy = (x > 0.0 ? x * std::log(x) : 0.0) + (x < 1.0 ? (1.0 - x) * std::log(1.0 - x) : 0.0);
  return -2.0 * b * l2 - entropy + x * (-l2 - 2.0 * b * l2 + std::log1p(std::exp2(4.0 * b)));
}

inline PtasSolution solve_ptas(double b) {
  if (!(b >= 0.0)) throw ParameterError("decay exponent must be non-negative");
  PtasSolution s;
  s.b_input = b;
  if (b == 0.0) return s;  // the balance vanishes at x_A = 0
  double lo = 1e-15, hi = 0.5 - 1e-15;
  double flo = ptas_balance(lo, b);
  const double fhi = ptas_balance(hi, b);
  if ((flo > 0) == (fhi > 0)) throw NumericError("no sign change for the approximation condition at b = " + std::to_string(b));
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    const double fm = ptas_balance(mid, b);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  s.x_A = 0.5 * (lo + hi);
  s.A = std::pow(1.0 - 2.0 * s.x_A, 3);
  return s;
}

}  // namespace xorfold

#endif  // XORFOLD_THEORY_HPP
