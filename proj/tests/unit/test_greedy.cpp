#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "xorfold/greedy.hpp"

using namespace xorfold;

TEST(BitGain, BitOutsideEveryConstraintIsZero) {
  const Instance inst(5, {{0, 1, 2, 1}}, 0.0, 0, BitString{0});
  EXPECT_EQ(bit_gain(inst, 0b11000, 4), 0);
  EXPECT_EQ(bit_gain(inst, 0, 3), 0);
}

TEST(BitGain, SingleViolatedConstraint) {
  const Instance inst(3, {{0, 1, 2, -1}});  // needs odd parity
  for (int b = 0; b < 3; ++b) EXPECT_EQ(bit_gain(inst, 0, b), 1);
  for (int b = 0; b < 3; ++b) EXPECT_EQ(bit_gain(inst, 1, b), -1);
}

TEST(BitGain, MatchesEnergyDifference) {
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    const auto inst = generate_ppsp(10, 40, 0.1, t);
    for (int k = 0; k < 50; ++k) {
      const BitString m = rng.bits(10);
      const int bit = static_cast<int>(rng.below(10));
      const long before = oracle::raw_energy(inst, m);
      const long after = oracle::raw_energy(inst, m ^ (BitString{1} << bit));
      EXPECT_EQ(-(after - before) / 2, bit_gain(inst, m, bit));
    }
  }
}

TEST(Descent, OneViolatedConstraintNeedsOneFlip) {
  const Instance inst(4, {{0, 1, 2, -1}, {1, 2, 3, 1}}, 0.0, 0, BitString{0b0001});
  Rng rng(1);
  // from 0: first constraint violated, second satisfied; only bit 0 has positive gain
  const auto r = greedy_descent(inst, 0, GreedyConfig{}, rng);
  EXPECT_EQ(r.steps, 1u);
  EXPECT_EQ(r.raw_energy, -2);
  EXPECT_DOUBLE_EQ(inst.normalize(r.raw_energy), -inst.n_constraints() * inst.scale());
}

TEST(Descent, EndsInSingleFlipLocalMinimum) {
  Rng rng(7);
  for (int t = 0; t < 30; ++t) {
    const auto inst = generate_ppsp(10, 30, 0.2, 50 + t);
    const auto r = greedy_descent(inst, rng.bits(10), GreedyConfig{}, rng);
    EXPECT_EQ(r.raw_energy, oracle::raw_energy(inst, r.string));
    for (int b = 0; b < 10; ++b) {
      EXPECT_GE(oracle::raw_energy(inst, r.string ^ (BitString{1} << b)), r.raw_energy);
      EXPECT_LE(bit_gain(inst, r.string, b), 0);
    }
  }
}

TEST(Descent, EnergyStrictlyDecreases) {
  // Replaying the RNG reproduces the path; the recorded step count bounds the drop.
  const auto inst = generate_ppsp(24, 96, 0.1, 3);
  Rng a(5);
  const BitString start = a.bits(24);
  const auto r = greedy_descent(inst, start, GreedyConfig{}, a);
  EXPECT_LE(r.raw_energy, inst.raw_energy(start) - 2 * static_cast<long>(r.steps));
}

TEST(Descent, RejectsNonPositiveExponent) {
  const auto inst = generate_ppsp(6, 8, 0.0, 1);
  Rng rng(0);
  GreedyConfig cfg;
  cfg.weight_exponent = 0.0;
  EXPECT_THROW(greedy_descent(inst, 0, cfg, rng), ParameterError);
}

TEST(Restarts, ZeroRestartsRejected) {
  const auto inst = generate_ppsp(6, 8, 0.0, 1);
  GreedyConfig cfg;
  cfg.restarts = 0;
  EXPECT_THROW(restart_search(inst, cfg), ParameterError);
}

TEST(Restarts, BestIsMinimumOfFound) {
  const auto inst = generate_ppsp(14, 56, 0.1, 9);
  GreedyConfig cfg;
  cfg.restarts = 300;
  cfg.seed = 4;
  const auto res = restart_search(inst, cfg);
  std::uint64_t hits = 0;
  for (const auto& lm : res.minima_found) {
    EXPECT_GE(inst.normalize(lm.raw_energy), res.best_energy);
    hits += lm.hits;
  }
  EXPECT_EQ(hits, 300u);
  EXPECT_EQ(res.success.size(), res.q_grid.size());
  for (std::size_t i = 1; i < res.success.size(); ++i) EXPECT_LE(res.success[i], res.success[i - 1]);
}

TEST(Restarts, ThreadCountDoesNotChangeResult) {
  const auto inst = generate_ppsp(16, 64, 0.1, 2);
  GreedyConfig cfg;
  cfg.restarts = 2000;
  cfg.seed = 8;
  cfg.threads = 1;
  const auto a = restart_search(inst, cfg);
  cfg.threads = 4;
  const auto b = restart_search(inst, cfg);
  EXPECT_EQ(a.success, b.success);
  EXPECT_EQ(a.steps_total, b.steps_total);
  ASSERT_EQ(a.minima_found.size(), b.minima_found.size());
  for (std::size_t i = 0; i < a.minima_found.size(); ++i) {
    EXPECT_EQ(a.minima_found[i].string, b.minima_found[i].string);
    EXPECT_EQ(a.minima_found[i].hits, b.minima_found[i].hits);
  }
}

TEST(Restarts, MatchesExactBasinMass) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto inst = generate_ppsp(10, 30, 0.1, seed);
    GreedyConfig cfg;
    cfg.restarts = 10000;
    cfg.seed = seed;
    const auto res = restart_search(inst, cfg, {1.0});
    const double exact = oracle::basin_probability(inst, 2.0, -inst.planted_depth());
    const double sigma = std::sqrt(exact * (1 - exact) / cfg.restarts);
    EXPECT_NEAR(res.success[0], exact, 3 * sigma + 1e-12) << "seed " << seed;
  }
}

TEST(Restarts, SparseSatisfiableInstanceAlwaysSolved) {
  // One constraint per disjoint triple: every violated triple has a downhill flip.
  std::vector<Constraint> cs;
  for (int t = 0; t < 6; ++t) cs.push_back({3 * t, 3 * t + 1, 3 * t + 2, (t % 2) ? -1 : 1});
  const Instance inst(18, cs, 0.0, 0, BitString{0b001000001000001000});
  ASSERT_EQ(inst.raw_energy(*inst.planted()), -6);
  GreedyConfig cfg;
  cfg.restarts = 500;
  const auto res = restart_search(inst, cfg, {1.0});
  EXPECT_DOUBLE_EQ(res.success[0], 1.0);
}
