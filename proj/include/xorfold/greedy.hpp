#ifndef XORFOLD_GREEDY_HPP
#define XORFOLD_GREEDY_HPP

// Quasi-greedy local search with random restarts.
//
// Each step scores every bit by k = (#unsatisfied - #satisfied) over the
// constraints containing it, groups the bits with k > 0 into classes by k,
// picks a class with probability proportional to w(k) * f_k (f_k is the
// fraction of bits in that class) and flips a uniformly random bit from it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "xorfold/errors.hpp"
#include "xorfold/grids.hpp"
#include "xorfold/instance.hpp"
#include "xorfold/parallel.hpp"
#include "xorfold/random.hpp"

namespace xorfold {

struct GreedyConfig {
  double weight_exponent = 2.0;  // w(k) = k^weight_exponent
  std::uint64_t restarts = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct LocalMinimum {
  BitString string = 0;
  std::int64_t raw_energy = 0;
  std::uint64_t hits = 0;  // restarts that ended here
};

struct DescentResult {
  BitString string = 0;
  std::int64_t raw_energy = 0;
  std::uint64_t steps = 0;
};

struct GreedyResult {
  double best_energy = 0.0;  // normalized when the instance has a scale, raw otherwise
  BitString best_string = 0;
  std::vector<LocalMinimum> minima_found;  // distinct end points, sorted by (energy, string)
  std::uint64_t steps_total = 0;
  std::uint64_t restarts = 0;
  std::vector<double> q_grid;
  std::vector<double> success;  // fraction of restarts ending at E <= q E_GS, per q
};

/// (#unsatisfied - #satisfied) among the constraints that contain `bit`.
inline int bit_gain(const Instance& inst, BitString m, int bit) {
  if (bit < 0 || bit >= inst.n_vars()) throw ParameterError("bit index out of range");
  int k = 0;
  for (int c : inst.incident(bit)) k += inst.satisfied(c, m) ? -1 : 1;
  return k;
}

/// One descent from `start` to a single-flip local minimum.
inline DescentResult greedy_descent(const Instance& inst, BitString start, const GreedyConfig& cfg, Rng& rng) {
  if (!(cfg.weight_exponent > 0.0)) throw ParameterError("weight exponent must be positive");
  const int n = inst.n_vars();
  const auto n_c = static_cast<std::size_t>(inst.n_constraints());
  BitString m = start & complement(0, n);

  std::vector<char> sat(n_c);
  for (std::size_t c = 0; c < n_c; ++c) sat[c] = inst.satisfied(static_cast<int>(c), m);
  std::vector<int> gain(static_cast<std::size_t>(n), 0);
  for (int v = 0; v < n; ++v)
    for (int c : inst.incident(v)) gain[static_cast<std::size_t>(v)] += sat[static_cast<std::size_t>(c)] ? -1 : 1;
  std::int64_t raw = inst.raw_energy(m);

  const auto constraints = inst.constraints();
  const std::uint64_t cap = 10ULL * static_cast<std::uint64_t>(n) * std::max<std::uint64_t>(n_c, 1);
  std::map<int, int> classes;  // k -> count, ascending k
  std::uint64_t steps = 0;
  for (;;) {
    classes.clear();
    for (int v = 0; v < n; ++v)
      if (gain[static_cast<std::size_t>(v)] > 0) ++classes[gain[static_cast<std::size_t>(v)]];
    if (classes.empty()) break;
    if (steps == cap) throw StateError("greedy descent exceeded its step cap");

    double total = 0.0;
    for (const auto& [k, count] : classes) total += std::pow(k, cfg.weight_exponent) * count;
    double u = rng.uniform() * total;
    int chosen = classes.rbegin()->first;
    for (const auto& [k, count] : classes) {
      u -= std::pow(k, cfg.weight_exponent) * count;
      if (u < 0.0) {
        chosen = k;
        break;
      }
    }
    auto pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(classes[chosen])));
    int bit = 0;
    for (; bit < n; ++bit)
      if (gain[static_cast<std::size_t>(bit)] == chosen && pick-- == 0) break;

    raw -= 2 * gain[static_cast<std::size_t>(bit)];
    m ^= BitString{1} << bit;
    for (int c : inst.incident(bit)) {
      const auto cu = static_cast<std::size_t>(c);
      const int delta = sat[cu] ? 2 : -2;  // constraint becomes unsatisfied (+) or satisfied (-)
      sat[cu] = !sat[cu];
      const auto& con = constraints[cu];
      for (int v : {con.i, con.j, con.k})
        if (v != bit) gain[static_cast<std::size_t>(v)] += delta;
    }
    gain[static_cast<std::size_t>(bit)] = -gain[static_cast<std::size_t>(bit)];
    ++steps;
  }
  return {m, raw, steps};
}

/// Independent descents from uniform random starts.
///
/// Restart r draws from Rng(derive_seed(cfg.seed, r)), so the result does not
/// depend on cfg.threads. Success frequencies need a planted scale; without
/// one they are left empty.
inline GreedyResult restart_search(const Instance& inst, const GreedyConfig& cfg,
                                   std::vector<double> q_grid = default_q_grid()) {
  if (cfg.restarts == 0) throw ParameterError("restarts must be at least 1");
  const int n = inst.n_vars();
  std::vector<DescentResult> runs(cfg.restarts);
  parallel_for(cfg.restarts, cfg.threads, [&](std::size_t r) {
    Rng rng(derive_seed(cfg.seed, r));
    const BitString start = rng.bits(n);
    runs[r] = greedy_descent(inst, start, cfg, rng);
  });

  GreedyResult out;
  out.restarts = cfg.restarts;
  std::map<std::pair<std::int64_t, BitString>, std::uint64_t> minima;
  for (const auto& d : runs) {
    ++minima[{d.raw_energy, d.string}];
    out.steps_total += d.steps;
  }
  out.minima_found.reserve(minima.size());
  for (const auto& [key, hits] : minima) out.minima_found.push_back({key.second, key.first, hits});
  const auto& best = out.minima_found.front();
  out.best_string = best.string;
  out.best_energy = inst.has_scale() ? inst.normalize(best.raw_energy) : static_cast<double>(best.raw_energy);

  if (inst.has_scale()) {
    out.q_grid = std::move(q_grid);
    out.success.assign(out.q_grid.size(), 0.0);
    for (std::size_t qi = 0; qi < out.q_grid.size(); ++qi) {
      std::uint64_t hits = 0;
      for (const auto& lm : out.minima_found)
        if (inst.reaches(lm.raw_energy, out.q_grid[qi])) hits += lm.hits;
      out.success[qi] = static_cast<double>(hits) / static_cast<double>(cfg.restarts);
    }
  }
  return out;
}

}  // namespace xorfold

#endif  // XORFOLD_GREEDY_HPP
