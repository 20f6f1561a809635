#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "xorfold/instance.hpp"
#include "xorfold/random.hpp"
#include "xorfold/theory.hpp"
#include "xorfold/two_well_ed.hpp"

using namespace xorfold;

namespace {

// Exact mean of (-1)^k when x distinct bits out of n are flipped and k of
// them land in a fixed triple (hypergeometric).
double exact_triple_parity(int x, int n) {
  double s = 0.0;
  for (int k = 0; k <= 3; ++k) {
    if (k > x || x - k > n - 3) continue;
    s += (k % 2 ? -1.0 : 1.0) * std::exp(log_binomial(3, k) + log_binomial(n - 3, x - k) - log_binomial(n, x));
  }
  return s;
}

}  // namespace

TEST(AvgFlip, Endpoints) {
  EXPECT_DOUBLE_EQ(avg_flip_energy(0, 14, 3), -14.0);
  EXPECT_DOUBLE_EQ(avg_flip_energy(7, 14, 3), 0.0);
  EXPECT_THROW(avg_flip_energy(15, 14, 3), ParameterError);
}

TEST(AvgFlip, ComplementAntisymmetryForOddP) {
  for (int p : {3, 5, 7})
    for (int x = 0; x <= 20; ++x) EXPECT_NEAR(avg_flip_energy(x, 20, p) + avg_flip_energy(20 - x, 20, p), 0.0, 1e-12);
}

TEST(AvgFlip, MonteCarloOnPlantedInstance) {
  // Random x-flip sequences away from the planted string of a satisfiable
  // N = 14, N_C = 84 instance. The sampled mean matches the exact
  // without-replacement value at every x; the closed form is its large-N
  // limit and coincides exactly at x = 0, N/2 and N.
  const int n = 14;
  const auto inst = generate_ppsp(n, 84, 0.0, 21);
  Rng rng(5);
  const int samples = 4000;
  for (int x = 0; x <= n; ++x) {
    double s = 0.0, s2 = 0.0;
    for (int t = 0; t < samples; ++t) {
      BitString m = *inst.planted();
      std::vector<int> bits(n);
      for (int i = 0; i < n; ++i) bits[i] = i;
      for (int i = 0; i < x; ++i) {
        const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
        std::swap(bits[i], bits[j]);
        m ^= BitString{1} << bits[i];
      }
      const double e = inst.normalized_energy(m);
      s += e;
      s2 += e * e;
    }
    const double mean = s / samples;
    const double se = std::sqrt(std::max(s2 / samples - mean * mean, 0.0) / samples);
    EXPECT_NEAR(mean, -n * exact_triple_parity(x, n), 3 * se + 1e-9) << "x = " << x;
    if (x == 0 || 2 * x == n || x == n) {
      EXPECT_NEAR(mean, avg_flip_energy(x, n, 3), 3 * se + 1e-9) << "x = " << x;
    }
  }
  // and the closed form is the large-N limit of the exact value
  for (double frac : {0.1, 0.25, 0.4}) {
    const int big = 4000;
    const int x = static_cast<int>(frac * big);
    EXPECT_NEAR(-exact_triple_parity(x, big), avg_flip_energy(x, big, 3) / big, 1e-3);
  }
}

TEST(CriticalField, PThree) {
  const double k = critical_field(3);
  EXPECT_NEAR(k, 1.29, 0.01);
  EXPECT_NEAR(1 + k * k / 6 + std::pow(k, 4) / 216 - k, 0.0, 1e-6);
}

TEST(CriticalField, LargePApproachesOne) {
  double prev = critical_field(3);
  for (int p : {5, 10, 50, 400}) {
    const double k = critical_field(p);
    EXPECT_LT(k, prev);
    prev = k;
  }
  EXPECT_NEAR(prev, 1.0, 0.01);
}

TEST(CriticalField, PTwoHasNoRoot) {
  // 1 + k^2/4 + k^4/64 - k = (1 - k/2)^2 + k^4/64 > 0 for every k
  for (double k = 0.0; k < 4.0; k += 0.001) EXPECT_GT(1 + k * k / 4 + std::pow(k, 4) / 64 - k, 0.0);
  EXPECT_THROW(critical_field(2), NumericError);
}

TEST(AqcGap, EmptySumIsOne) { EXPECT_DOUBLE_EQ(log_aqc_overlap_gap(0, 1.29), 0.0); }

TEST(AqcGap, FourSpinsByHand) {
  // E~(n) = 4 - 4 (1 - n/2)^3: 7/2, 4, 9/2, 8
  const double k = 0.8;
  const double sum = 1 + k * 4 / 3.5 + k * k * 12 / (3.5 * 4) + std::pow(k, 3) * 24 / (3.5 * 4 * 4.5) +
                     std::pow(k, 4) * 24 / (3.5 * 4 * 4.5 * 8);
  EXPECT_NEAR(std::exp(log_aqc_overlap_gap(4, k)), 0.25 * sum, 1e-14);
}

TEST(AqcGap, LargeNStaysFinite) {
  const double l = log_aqc_overlap_gap(200, 1.29);
  EXPECT_TRUE(std::isfinite(l));
  EXPECT_LT(l, 0.0);
}

TEST(TwoWell, BareEnergyExamples) {
  const auto w = TwoWellParams::symmetric(20, 3, 1.0);
  EXPECT_DOUBLE_EQ(bare_two_well_energy(0, 0, w), -20.0);
  EXPECT_DOUBLE_EQ(bare_two_well_energy(10, 0, w), -20.0);
  EXPECT_DOUBLE_EQ(bare_two_well_energy(5, 0, w), -5.0);
}

TEST(TwoWell, WellExchangeSymmetry) {
  for (int p : {2, 3, 4, 5}) {
    const auto w = TwoWellParams::symmetric(24, p, 1.0);
    for (int m = 0; m <= 12; ++m)
      for (int n = 0; n <= 12; ++n)
        EXPECT_NEAR(bare_two_well_energy(m, n, w), bare_two_well_energy(12 - m, n, w), 1e-10) << p << " " << m << " " << n;
  }
}

TEST(TwoWell, CostVanishesAtTheMinimum) {
  for (int p : {2, 3, 5, 9}) EXPECT_NEAR(dressed_flip_cost(0, 0, TwoWellParams::symmetric(40, p, 1.0)), 0.0, 1e-10);
}

TEST(TwoWell, ZeroFieldCostIsBareGap) {
  for (int p : {3, 4})
    for (int m = 0; m <= 6; ++m)
      for (int n = 0; n <= 2; ++n) {
        const auto w = TwoWellParams::symmetric(24, p, 0.0);
        EXPECT_NEAR(raw_flip_cost(m, n, w), bare_two_well_energy(m, n, w) + 24, 1e-10);
      }
}

TEST(TwoWell, PTwoCorrectionIsMIndependent) {
  const auto w = TwoWellParams::symmetric(32, 2, 1.1);
  const double c0 = raw_flip_cost(0, 0, w) - bare_two_well_energy(0, 0, w);
  for (int m = 1; m <= 16; ++m) EXPECT_NEAR(raw_flip_cost(m, 0, w) - bare_two_well_energy(m, 0, w), c0, 1e-9) << m;
}

TEST(TwoWell, HighPRegularization) {
  const auto w = TwoWellParams::symmetric(40, 5, 1.1);
  const auto t = flip_cost_table(w);
  const auto mc = std::max_element(t.u0.begin() + 1, t.u0.end()) - t.u0.begin();
  for (std::size_t m = static_cast<std::size_t>(mc); m < t.u0.size(); ++m) EXPECT_EQ(t.u0[m], t.u0[mc]);
  for (std::size_t m = 0; m < t.u0.size(); ++m) EXPECT_GE(t.u1[m], t.u0[m]);
}

TEST(TwoWell, DisconnectedSpinLeavesRateUnchanged) {
  const std::vector<double> u0 = {0.0, 2.0, 3.5, 4.0, 4.2};
  for (double U : {0.3, 1.0, 7.5}) {
    std::vector<double> u1(u0);
    for (double& u : u1) u += U;
    const auto f = secondary_factors(u0, u1, 1.2);
    EXPECT_NEAR(f.gamma_t, f.gamma_r, 1e-12 * f.gamma_r) << U;
  }
}

TEST(TwoWell, TheoryFiniteAndDecaying) {
  double prev = 0.0;
  for (int n = 20; n <= 80; n += 20) {
    const auto r = two_well_gap_theory(TwoWellParams::symmetric(n, 3, 1.25));
    EXPECT_TRUE(std::isfinite(r.log_omega));
    if (n > 20) {
      EXPECT_LT(r.log_omega, prev);
    }
    prev = r.log_omega;
  }
  EXPECT_THROW(two_well_gap_theory(TwoWellParams{20, 9, 3, 1.0}), ParameterError);
}

TEST(TwoWellEd, MatchesFullDiagonalizationAtFourSpins) {
  // Group A = spins 0,1 (agree between wells), group B = spins 2,3.
  for (int p : {2, 3, 4}) {
    const TwoWellParams w{4, 2, p, 0.6};
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(16, 16);
    for (int s = 0; s < 16; ++s) {
      double za = 0, zb = 0;
      for (int q = 0; q < 4; ++q) ((q < 2) ? za : zb) += ((s >> q) & 1) ? 1.0 : -1.0;
      h(s, s) = -4.0 * (std::pow((za + zb) / 4, p) + std::pow((za - zb) / 4, p));
      for (int q = 0; q < 4; ++q) h(s, s ^ (1 << q)) -= w.kappa;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> coll(two_well_collective_hamiltonian(w));
    const auto& fe = full.eigenvalues();
    const auto& ce = coll.eigenvalues();
    EXPECT_NEAR(ce(0), fe(0), 1e-10);
    // every collective level appears in the full spectrum
    for (Eigen::Index i = 0; i < ce.size(); ++i) {
      double best = 1e9;
      for (Eigen::Index j = 0; j < fe.size(); ++j) best = std::min(best, std::abs(fe(j) - ce(i)));
      EXPECT_LT(best, 1e-10) << "p = " << p << " level " << i;
    }
    // the doublet is the lowest pair of the full problem
    EXPECT_NEAR(two_well_gap_ed(w).omega, 0.5 * (fe(1) - fe(0)), 1e-10) << p;
  }
}

TEST(TwoWellEd, GapPositive) {
  for (int p : {2, 3, 5})
    for (int n : {10, 20, 30})
      for (double k : {0.5, 1.0}) EXPECT_GT(two_well_gap_ed(TwoWellParams::symmetric(n, p, k)).omega, 0.0);
}

TEST(TwoWellEd, FlagsCriticalRegime) {
  EXPECT_FALSE(two_well_gap_ed(TwoWellParams::symmetric(10, 3, 1.2)).beyond_critical);
  EXPECT_TRUE(two_well_gap_ed(TwoWellParams::symmetric(10, 3, 1.35)).beyond_critical);
  EXPECT_TRUE(two_well_gap_ed(TwoWellParams::symmetric(10, 2, 2.1)).beyond_critical);
}

TEST(P2, ZeroFieldWIsOne) { EXPECT_DOUBLE_EQ(p2_gap(20, 0.0).log_w, 0.0); }

TEST(P2, RejectsOutOfRange) {
  EXPECT_THROW(p2_gap(20, 2.0), ParameterError);
  EXPECT_THROW(p2_gap(21, 1.0), ParameterError);
}

TEST(P2, HighOrderTermsStayFinite) {
  const auto g = p2_gap(200, 1.9);
  EXPECT_TRUE(std::isfinite(g.log_w));
  EXPECT_TRUE(std::isfinite(g.log_omega));
}

TEST(Fit, RecoversSyntheticSqrtForm) {
  std::vector<DecayPoint> pts;
  for (int n = 10; n <= 40; n += 5) pts.push_back({double(n), 3 * std::sqrt(n) * std::exp2(-0.2 * n)});
  const auto f = fit_decay(pts);
  EXPECT_NEAR(f.a, 3.0, 1e-10);
  EXPECT_NEAR(f.b, 0.2, 1e-10);
  EXPECT_NEAR(f.residual, 0.0, 1e-10);
}

TEST(Fit, ConstantSeries) {
  std::vector<DecayPoint> pts;
  for (int n = 10; n <= 30; n += 2) pts.push_back({double(n), 0.4});
  const auto f = fit_decay(pts, kPlainExp);
  EXPECT_NEAR(f.b, 0.0, 1e-12);
  EXPECT_NEAR(f.a, 0.4, 1e-12);
}

TEST(Fit, RejectsBadInput) {
  std::vector<DecayPoint> pts{{10, 0.1}, {12, 0.0}, {14, 0.05}};
  EXPECT_THROW(fit_decay(pts), DomainError);
  pts.pop_back();
  pts[1].value = 0.1;
  EXPECT_THROW(fit_decay(pts), ParameterError);
}

TEST(Fit, NoisyDataInsideBootstrapInterval) {
  Rng rng(12);
  auto gauss = [&rng] { return std::sqrt(-2 * std::log(1 - rng.uniform())) * std::cos(2 * std::numbers::pi * rng.uniform()); };
  std::vector<DecayPoint> pts;
  for (int n = 10; n <= 40; ++n) pts.push_back({double(n), std::exp2(-0.15 * n + 0.3 * gauss())});
  const double b = fit_decay(pts, kPlainExp).b;
  std::vector<double> boot;
  for (int r = 0; r < 1000; ++r) {
    std::vector<DecayPoint> res;
    for (std::size_t i = 0; i < pts.size(); ++i) res.push_back(pts[rng.below(pts.size())]);
    std::sort(res.begin(), res.end(), [](auto& x, auto& y) { return x.n < y.n; });
    if (res.front().n == res.back().n) continue;
    boot.push_back(fit_decay(res, kPlainExp).b);
  }
  std::sort(boot.begin(), boot.end());
  const double lo = boot[boot.size() * 25 / 1000], hi = boot[boot.size() * 975 / 1000];
  EXPECT_LE(lo, b);
  EXPECT_GE(hi, b);
  EXPECT_LE(lo, 0.15);
  EXPECT_GE(hi, 0.15);
}

TEST(Fit, BestFormPicksSmallestResidual) {
  std::vector<double> ns, ly;
  for (int n = 20; n <= 60; n += 4) {
    ns.push_back(n);
    ly.push_back(std::log2(n) - 0.1 * n);
  }
  const std::vector<DecayForm> forms{kPlainExp, kSqrtNExp, kLinearNExp};
  const auto f = fit_decay_best_log2(ns, ly, forms);
  EXPECT_EQ(f.form.prefactor_power, 1.0);
  EXPECT_NEAR(f.b, 0.1, 1e-10);
}

TEST(Ptas, ZeroDecay) {
  const auto s = solve_ptas(0.0);
  EXPECT_EQ(s.x_A, 0.0);
  EXPECT_EQ(s.A, 1.0);
}

TEST(Ptas, TwoTenths) {
  const auto s = solve_ptas(0.2);
  EXPECT_NEAR(s.x_A, 0.08, 0.005);
  EXPECT_NEAR(ptas_balance(s.x_A, 0.2), 0.0, 1e-10);
  EXPECT_DOUBLE_EQ(s.A, std::pow(1 - 2 * s.x_A, 3));
}

TEST(Ptas, MonotoneInDecay) {
  double prev = 1.0;
  for (double b = 0.05; b <= 0.5 + 1e-12; b += 0.005) {
    const auto s = solve_ptas(b);
    EXPECT_LT(s.A, prev) << b;
    EXPECT_GE(s.x_A, 0.0);
    EXPECT_LT(s.x_A, 0.5);
    prev = s.A;
  }
  EXPECT_THROW(solve_ptas(-0.1), ParameterError);
}
