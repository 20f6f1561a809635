#ifndef XORFOLD_INSTANCE_HPP
#define XORFOLD_INSTANCE_HPP

// MAX-3-XORSAT instances with a planted partial solution.
//
// Spin convention: bit b = 0 is the Z = +1 eigenstate, bit b = 1 is Z = -1.
// A constraint (i, j, k, V) contributes -V Z_i Z_j Z_k to the energy and is
// satisfied when V Z_i Z_j Z_k = +1, i.e. when b_i ^ b_j ^ b_k == (V < 0).
// Bit q of a BitString is variable q.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xorfold/errors.hpp"
#include "xorfold/random.hpp"

namespace xorfold {

using BitString = std::uint64_t;

inline constexpr int kMaxVariables = 64;

struct Constraint {
  int i = 0;
  int j = 0;
  int k = 0;
  int sign = 1;  // V_ijk, +1 or -1

  friend bool operator==(const Constraint&, const Constraint&) = default;
  friend auto operator<=>(const Constraint&, const Constraint&) = default;

  constexpr BitString mask() const noexcept {
    return (BitString{1} << i) | (BitString{1} << j) | (BitString{1} << k);
  }
  /// Right-hand side of the equivalent GF(2) equation b_i ^ b_j ^ b_k = rhs.
  constexpr int rhs() const noexcept { return sign < 0 ? 1 : 0; }

  constexpr bool satisfied_by(BitString m) const noexcept {
    return (std::popcount(m & mask()) & 1) == rhs();
  }
};

/// Sorts the indices of a triple and validates it against `n` variables.
inline Constraint canonical(Constraint c, int n) {
  int idx[3] = {c.i, c.j, c.k};
  std::sort(idx, idx + 3);
  if (idx[0] < 0 || idx[2] >= n) throw ParameterError("constraint index out of range");
  if (idx[0] == idx[1] || idx[1] == idx[2]) throw ParameterError("constraint indices must be distinct");
  if (c.sign != 1 && c.sign != -1) throw ParameterError("constraint sign must be +1 or -1");
  return {idx[0], idx[1], idx[2], c.sign};
}

constexpr int hamming_distance(BitString a, BitString b) noexcept { return std::popcount(a ^ b); }

constexpr BitString complement(BitString m, int n) noexcept {
  return n >= 64 ? ~m : (~m & ((BitString{1} << n) - 1));
}

constexpr std::uint64_t triple_count(int n) noexcept {
  const auto u = static_cast<std::uint64_t>(n);
  return n < 3 ? 0 : u * (u - 1) * (u - 2) / 6;
}

/// Immutable MAX-3-XORSAT instance.
///
/// Constraints are stored in canonical order (sorted triples, then sorted
/// list), so two instances built from the same constraint set compare equal
/// and serialize identically.
class Instance {
 public:
  Instance(int n_vars, std::vector<Constraint> constraints, double epsilon = 0.0, std::uint64_t seed = 0,
           std::optional<BitString> planted = std::nullopt)
      : n_(n_vars), epsilon_(epsilon), seed_(seed), planted_(planted) {
    if (n_ < 3 || n_ > kMaxVariables) throw ParameterError("variable count must be in [3, 64]");
    if (!(epsilon_ >= 0.0 && epsilon_ < 0.5)) throw ParameterError("epsilon must be in [0, 1/2)");
    constraints_.reserve(constraints.size());
    for (const auto& c : constraints) constraints_.push_back(canonical(c, n_));
    std::sort(constraints_.begin(), constraints_.end());
    for (std::size_t a = 1; a < constraints_.size(); ++a) {
      const auto& p = constraints_[a - 1];
      const auto& q = constraints_[a];
      if (p.i == q.i && p.j == q.j && p.k == q.k) throw ParameterError("duplicate constraint triple");
    }
    if (planted_ && (*planted_ >> (n_ - 1) >> 1) != 0) throw ParameterError("planted string wider than n");

    incidence_.assign(static_cast<std::size_t>(n_), {});
    masks_.reserve(constraints_.size());
    rhs_.reserve(constraints_.size());
    for (std::size_t c = 0; c < constraints_.size(); ++c) {
      const auto& con = constraints_[c];
      incidence_[con.i].push_back(static_cast<int>(c));
      incidence_[con.j].push_back(static_cast<int>(c));
      incidence_[con.k].push_back(static_cast<int>(c));
      masks_.push_back(con.mask());
      rhs_.push_back(static_cast<std::uint8_t>(con.rhs()));
    }
    if (planted_) {
      const std::int64_t e = raw_energy(*planted_);
      // Normalization needs the planted string to beat random guessing.
      if (e < 0) planted_depth_ = -e;
    }
  }

  int n_vars() const noexcept { return n_; }
  int n_constraints() const noexcept { return static_cast<int>(constraints_.size()); }
  double epsilon() const noexcept { return epsilon_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::optional<BitString>& planted() const noexcept { return planted_; }
  std::span<const Constraint> constraints() const noexcept { return constraints_; }
  std::span<const BitString> masks() const noexcept { return masks_; }
  /// Indices of the constraints containing variable `v`.
  std::span<const int> incident(int v) const { return incidence_.at(static_cast<std::size_t>(v)); }
  std::size_t degree(int v) const { return incidence_.at(static_cast<std::size_t>(v)).size(); }

  bool satisfied(int c, BitString m) const noexcept {
    return (std::popcount(m & masks_[static_cast<std::size_t>(c)]) & 1) == rhs_[static_cast<std::size_t>(c)];
  }

  int count_satisfied(BitString m) const noexcept {
    int sat = 0;
    for (std::size_t c = 0; c < masks_.size(); ++c) sat += (std::popcount(m & masks_[c]) & 1) == rhs_[c];
    return sat;
  }

  /// N_unsat - N_sat.
  std::int64_t raw_energy(BitString m) const noexcept {
    return static_cast<std::int64_t>(masks_.size()) - 2 * static_cast<std::int64_t>(count_satisfied(m));
  }

  bool has_scale() const noexcept { return planted_depth_ > 0; }

  /// Multiplier that maps raw energies onto the scale where E(planted) = -N.
  double scale() const {
    require_scale();
    return static_cast<double>(n_) / static_cast<double>(planted_depth_);
  }

  /// Raw-energy magnitude of the planted string (N_sat - N_unsat at G).
  std::int64_t planted_depth() const {
    require_scale();
    return planted_depth_;
  }

  /// Energy rescaled so that the planted string sits at exactly -N.
  double normalized_energy(BitString m) const {
    require_scale();
    return normalize(raw_energy(m));
  }

  /// Same rescaling applied to an already computed raw energy. Integer
  /// numerator keeps normalize(raw(G)) == -N exact.
  double normalize(std::int64_t raw) const noexcept {
    return static_cast<double>(raw * n_) / static_cast<double>(planted_depth_);
  }

  /// Whether raw energy `raw` satisfies E <= q E_GS on the normalized scale.
  /// Compared in raw units so q = 1 is exact.
  bool reaches(std::int64_t raw, double q) const {
    require_scale();
    return static_cast<double>(raw) <= -q * static_cast<double>(planted_depth_) + 1e-9;
  }

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.n_ == b.n_ && a.epsilon_ == b.epsilon_ && a.seed_ == b.seed_ && a.planted_ == b.planted_ &&
           a.constraints_ == b.constraints_;
  }

 private:
  void require_scale() const {
    if (!planted_) throw StateError("instance has no planted string; normalization undefined");
    if (planted_depth_ <= 0) throw StateError("planted string does not beat random guessing; normalization undefined");
  }

  int n_;
  double epsilon_;
  std::uint64_t seed_;
  std::optional<BitString> planted_;
  std::int64_t planted_depth_ = 0;
  std::vector<Constraint> constraints_;
  std::vector<std::vector<int>> incidence_;
  std::vector<BitString> masks_;
  std::vector<std::uint8_t> rhs_;
};

/// N_C distinct triples drawn uniformly, each with sign +1, in draw order.
inline std::vector<Constraint> sample_triples(int n, int n_constraints, Rng& rng) {
  if (n < 3 || n > kMaxVariables) throw ParameterError("N must be in [3, 64]");
  if (n_constraints < 0 || static_cast<std::uint64_t>(n_constraints) > triple_count(n))
    throw ParameterError("N_C exceeds the number of distinct triples");
  std::vector<Constraint> triples;
  triples.reserve(static_cast<std::size_t>(n_constraints));
  const auto total = triple_count(n);
  if (2 * static_cast<std::uint64_t>(n_constraints) > total) {
    // Dense request: partial shuffle of the full triple list.
    std::vector<Constraint> all;
    all.reserve(total);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k) all.push_back({i, j, k, 1});
    for (int a = 0; a < n_constraints; ++a) {
      const auto b = a + rng.below(total - static_cast<std::uint64_t>(a));
      std::swap(all[static_cast<std::size_t>(a)], all[b]);
      triples.push_back(all[static_cast<std::size_t>(a)]);
    }
  } else {
    std::vector<std::uint64_t> seen;  // sorted keys i*n*n + j*n + k
    while (static_cast<int>(triples.size()) < n_constraints) {
      const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      const int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      const int c = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      if (a == b || b == c || a == c) continue;
      const auto t = canonical({a, b, c, 1}, n);
      const std::uint64_t key = (static_cast<std::uint64_t>(t.i) * n + t.j) * n + t.k;
      const auto it = std::lower_bound(seen.begin(), seen.end(), key);
      if (it != seen.end() && *it == key) continue;
      seen.insert(it, key);
      triples.push_back(t);
    }
  }

  return triples;
}

/// Number of constraints a planted string satisfies for (N_C, epsilon).
inline int planted_satisfied_count(int n_constraints, double epsilon) {
  return static_cast<int>(std::lround((1.0 - epsilon) * n_constraints));
}

/// Planted-partial-solution instance.
///
/// Draws N_C distinct triples uniformly, a uniform planted string G, then a
/// uniformly random subset of round((1 - eps) N_C) constraints whose signs are
/// set so that G satisfies them; the remaining signs make G violate them.
inline Instance generate_ppsp(int n, int n_constraints, double epsilon, std::uint64_t seed) {
  if (n < 3 || n > kMaxVariables) throw ParameterError("N must be in [3, 64]");
  if (n_constraints < 1) throw ParameterError("N_C must be positive");
  if (static_cast<std::uint64_t>(n_constraints) > triple_count(n)) throw ParameterError("N_C exceeds the number of distinct triples");
  if (!(epsilon >= 0.0 && epsilon < 0.5)) throw ParameterError("epsilon must be in [0, 1/2)");
  const int n_sat = planted_satisfied_count(n_constraints, epsilon);
  if (2 * n_sat - n_constraints <= 0) throw ParameterError("rounded satisfied count leaves the planted energy non-negative");

  Rng rng(seed);
  auto triples = sample_triples(n, n_constraints, rng);

  const BitString planted = rng.bits(n);

  std::vector<int> order(static_cast<std::size_t>(n_constraints));
  for (int a = 0; a < n_constraints; ++a) order[static_cast<std::size_t>(a)] = a;
  for (int a = 0; a < n_sat; ++a) {
    const auto b = a + rng.below(static_cast<std::uint64_t>(n_constraints - a));
    std::swap(order[static_cast<std::size_t>(a)], order[b]);
  }
  std::vector<char> satisfy(static_cast<std::size_t>(n_constraints), 0);
  for (int a = 0; a < n_sat; ++a) satisfy[static_cast<std::size_t>(order[static_cast<std::size_t>(a)])] = 1;

  for (int a = 0; a < n_constraints; ++a) {
    auto& t = triples[static_cast<std::size_t>(a)];
    const int parity = std::popcount(planted & t.mask()) & 1;
    // Satisfied at G iff parity == rhs, and rhs = 1 <=> sign = -1.
    const int rhs = satisfy[static_cast<std::size_t>(a)] ? parity : parity ^ 1;
    t.sign = rhs ? -1 : 1;
  }
  return Instance(n, std::move(triples), epsilon, seed, planted);
}

/// Result of GF(2) elimination on the XOR system of an instance.
struct XorSolution {
  bool satisfiable = false;
  std::optional<BitString> witness;
};

/// Decides whether every constraint can be satisfied at once.
///
/// Gauss-Jordan elimination over GF(2) with one 64-bit row per constraint
/// (the augmented right-hand side is kept separately). Free variables are set
/// to zero in the returned witness.
inline XorSolution xor_satisfiable(int n, std::span<const Constraint> constraints) {
  if (n < 1 || n > kMaxVariables) throw ParameterError("variable count must be in [1, 64]");
  std::vector<BitString> rows;
  std::vector<int> rhs;
  rows.reserve(constraints.size());
  for (const auto& c : constraints) {
    rows.push_back(c.mask());
    rhs.push_back(c.rhs());
  }
  std::vector<int> pivot_col;
  std::size_t rank = 0;
  for (int col = 0; col < n && rank < rows.size(); ++col) {
    const BitString bit = BitString{1} << col;
    std::size_t sel = rank;
    while (sel < rows.size() && !(rows[sel] & bit)) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[rank], rows[sel]);
    std::swap(rhs[rank], rhs[sel]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r != rank && (rows[r] & bit)) {
        rows[r] ^= rows[rank];
        rhs[r] ^= rhs[rank];
      }
    }
    pivot_col.push_back(col);
    ++rank;
  }
  for (std::size_t r = rank; r < rows.size(); ++r)
    if (rows[r] == 0 && rhs[r] == 1) return {false, std::nullopt};
  BitString witness = 0;
  for (std::size_t r = 0; r < rank; ++r)
    if (rhs[r]) witness |= BitString{1} << pivot_col[r];
  return {true, witness};
}

inline XorSolution xor_satisfiable(const Instance& inst) {
  return xor_satisfiable(inst.n_vars(), inst.constraints());
}

}  // namespace xorfold

#endif  // XORFOLD_INSTANCE_HPP
