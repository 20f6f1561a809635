#ifndef XORFOLD_SIMULATOR_HPP
#define XORFOLD_SIMULATOR_HPP

// Dense statevector engine.
//
// Amplitude index m is the bit string itself (bit q = qubit q). Diagonal
// layers multiply by exp(-i angle table_m); the mixer layer applies
// exp(i angle X_j) on every qubit, which is the driver evolution for
// H_D = -sum_j X_j.

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xorfold/errors.hpp"
#include "xorfold/grids.hpp"
#include "xorfold/instance.hpp"
#include "xorfold/random.hpp"

namespace xorfold {

using Amplitude = std::complex<double>;

inline constexpr int kMaxQubits = 30;

class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(int n) : n_(n), amps_(std::size_t{1} << n) {}

  int n_qubits() const noexcept { return n_; }
  std::size_t size() const noexcept { return amps_.size(); }
  Amplitude& operator[](std::size_t m) noexcept { return amps_[m]; }
  const Amplitude& operator[](std::size_t m) const noexcept { return amps_[m]; }
  std::span<Amplitude> amplitudes() noexcept { return amps_; }
  std::span<const Amplitude> amplitudes() const noexcept { return amps_; }

  double norm_squared() const noexcept {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }

 private:
  int n_ = 0;
  std::vector<Amplitude> amps_;
};

enum class InitKind { uniform, basis };

inline StateVector init_state(int n, InitKind kind, BitString m = 0) {
  if (n < 1) throw ParameterError("qubit count must be positive");
  if (n > kMaxQubits) throw ResourceError("qubit count " + std::to_string(n) + " exceeds cap " + std::to_string(kMaxQubits));
  StateVector psi(n);
  if (kind == InitKind::uniform) {
    const double a = std::pow(2.0, -0.5 * n);
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = a;
  } else {
    if (m >= psi.size()) throw ParameterError("basis index out of range");
    psi[m] = 1.0;
  }
  return psi;
}

/// Raw energy (unsat - sat) of every basis state, by Gray-code walk.
/// Each step flips one bit and touches only the constraints containing it.
inline std::vector<std::int32_t> raw_energy_table(const Instance& inst) {
  const int n = inst.n_vars();
  if (n > kMaxQubits) throw ResourceError("table size exceeds qubit cap");
  const std::size_t dim = std::size_t{1} << n;
  std::vector<std::int32_t> table(dim);
  std::vector<char> sat(static_cast<std::size_t>(inst.n_constraints()));
  for (std::size_t c = 0; c < sat.size(); ++c) sat[c] = inst.satisfied(static_cast<int>(c), 0);
  auto raw = static_cast<std::int32_t>(inst.raw_energy(0));
  table[0] = raw;
  BitString g = 0;
  for (std::size_t i = 1; i < dim; ++i) {
    const int j = std::countr_zero(i);
    g ^= BitString{1} << j;
    for (int c : inst.incident(j)) {
      auto& s = sat[static_cast<std::size_t>(c)];
      raw += s ? 2 : -2;
      s = !s;
    }
    table[g] = raw;
  }
  return table;
}

enum class LoweringKind { xor3, local_z };

/// Auxiliary diagonal term whose global minimum is the anchor string L.
///
/// xor3: random triples with signs chosen so L satisfies all of them; raw
/// energy is unsat - sat, so the minimum is -N_C. local_z: h_j Z_j with h_j
/// aligned to L; raw energy 2 d_H(m, L) - N, minimum -N. c0 multiplies the
/// raw values.
struct LoweringHamiltonian {
  LoweringKind kind = LoweringKind::xor3;
  int n = 0;
  BitString anchor = 0;
  double c0 = 0.0;
  std::vector<Constraint> constraints;  // xor3 only

  std::int64_t raw_min() const {
    return kind == LoweringKind::xor3 ? -static_cast<std::int64_t>(constraints.size()) : -static_cast<std::int64_t>(n);
  }
};

/// Lowering term for anchor L with the customary strength: C_0 |min| = 2N for
/// xor3 (same triple count as the instance) and 3N for local_z.
inline LoweringHamiltonian make_lowering(const Instance& inst, LoweringKind kind, BitString anchor, std::uint64_t seed) {
  const int n = inst.n_vars();
  LoweringHamiltonian h;
  h.kind = kind;
  h.n = n;
  h.anchor = anchor & complement(0, n);
  if (kind == LoweringKind::xor3) {
    Rng rng(seed);
    h.constraints = sample_triples(n, inst.n_constraints(), rng);
    for (auto& c : h.constraints) c.sign = (std::popcount(h.anchor & c.mask()) & 1) ? -1 : 1;
    h.c0 = 2.0 * n / static_cast<double>(h.constraints.size());
  } else {
    h.c0 = 3.0;
  }
  return h;
}

inline std::vector<std::int32_t> lowering_raw_table(const LoweringHamiltonian& h) {
  if (h.n > kMaxQubits) throw ResourceError("table size exceeds qubit cap");
  if (h.kind == LoweringKind::xor3) return raw_energy_table(Instance(h.n, h.constraints, 0.0, 0, h.anchor));
  const std::size_t dim = std::size_t{1} << h.n;
  std::vector<std::int32_t> t(dim);
  for (std::size_t m = 0; m < dim; ++m) t[m] = 2 * hamming_distance(m, h.anchor) - h.n;
  return t;
}

enum class TableKind { problem, folded_linear, folded_quadratic, lowering };

inline std::string to_string(TableKind k) {
  switch (k) {
    case TableKind::problem: return "problem";
    case TableKind::folded_linear: return "folded_linear";
    case TableKind::folded_quadratic: return "folded_quadratic";
    case TableKind::lowering: return "lowering";
  }
  return "?";
}

struct DiagonalTable {
  TableKind kind = TableKind::problem;
  double A = 1.0;
  std::vector<double> values;
};

/// Folded value of normalized energy e at target A on N spins.
inline double fold_value(TableKind kind, double e, double A, int n) {
  const double shifted = e + A * n;
  if (kind == TableKind::folded_linear) return std::abs(shifted) / A;
  return shifted * shifted / (A * A * n);
}

/// Diagonal from a precomputed raw problem table. Lowering tables hold raw
/// lowering energies; the protocol supplies the C(t) coefficient.
inline DiagonalTable build_diagonal(const Instance& inst, std::span<const std::int32_t> raw, TableKind kind,
                                    double A = 1.0, const LoweringHamiltonian* lowering = nullptr) {
  DiagonalTable t{kind, A, {}};
  if (kind == TableKind::lowering) {
    if (!lowering) throw ParameterError("lowering table needs a lowering Hamiltonian");
    const auto lr = lowering_raw_table(*lowering);
    t.values.assign(lr.begin(), lr.end());
    return t;
  }
  if ((kind == TableKind::folded_linear || kind == TableKind::folded_quadratic) && !(A > 0.0 && A <= 1.0))
    throw ParameterError("fold target A must be in (0, 1]");
  if (!inst.has_scale()) throw StateError("instance has no planted normalization");
  const int n = inst.n_vars();
  t.values.resize(raw.size());
  for (std::size_t m = 0; m < raw.size(); ++m) {
    const double e = inst.normalize(raw[m]);
    t.values[m] = kind == TableKind::problem ? e : fold_value(kind, e, A, n);
  }
  return t;
}

inline DiagonalTable build_diagonal(const Instance& inst, TableKind kind, double A = 1.0,
                                    const LoweringHamiltonian* lowering = nullptr) {
  if (kind == TableKind::lowering) return build_diagonal(inst, {}, kind, A, lowering);
  if ((kind == TableKind::folded_linear || kind == TableKind::folded_quadratic) && !(A > 0.0 && A <= 1.0))
    throw ParameterError("fold target A must be in (0, 1]");
  if (!inst.has_scale()) throw StateError("instance has no planted normalization");
  const auto raw = raw_energy_table(inst);
  return build_diagonal(inst, raw, kind, A, lowering);
}

/// psi_m <- exp(-i angle table_m) psi_m.
inline void apply_phase(StateVector& psi, std::span<const double> table, double angle) {
  if (table.size() != psi.size()) throw ParameterError("table length does not match state");
  for (std::size_t m = 0; m < psi.size(); ++m) psi[m] *= std::polar(1.0, -angle * table[m]);
}

inline void apply_phase(StateVector& psi, const DiagonalTable& table, double angle) {
  apply_phase(psi, table.values, angle);
}

/// psi_m <- exp(-i angle (base_m + coeff extra_m)) psi_m, without forming the sum table.
inline void apply_phase(StateVector& psi, std::span<const double> base, std::span<const double> extra, double coeff,
                        double angle) {
  if (base.size() != psi.size() || extra.size() != psi.size()) throw ParameterError("table length does not match state");
  for (std::size_t m = 0; m < psi.size(); ++m) psi[m] *= std::polar(1.0, -angle * (base[m] + coeff * extra[m]));
}

/// exp(i angle X_j) on every qubit j.
inline void apply_mixer(StateVector& psi, double angle) {
  const double c = std::cos(angle);
  const Amplitude is{0.0, std::sin(angle)};
  const std::size_t dim = psi.size();
  for (int j = 0; j < psi.n_qubits(); ++j) {
    const std::size_t stride = std::size_t{1} << j;
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
      for (std::size_t m = base; m < base + stride; ++m) {
        const Amplitude a = psi[m];
        const Amplitude b = psi[m + stride];
        psi[m] = c * a + is * b;
        psi[m + stride] = is * a + c * b;
      }
    }
  }
}

struct MeasureStats {
  std::vector<double> q_grid;
  std::vector<double> p_q;  // P(E <= q E_GS)
  std::vector<double> d_grid;
  std::vector<double> p_d;  // P(D_H(m, G) <= d N)
  std::map<int, double> energy_bins;  // bin k holds E/E_GS in [0.05 k, 0.05 (k+1))
  std::vector<double> distance_mass;  // mass at each Hamming distance 0..N from G
  double expected_energy = 0.0;        // normalized
};

/// Exact masses from |psi_m|^2 given the raw problem table.
inline MeasureStats measure_stats(const StateVector& psi, const Instance& inst, std::span<const std::int32_t> raw,
                                  std::vector<double> q_grid = default_q_grid(),
                                  std::vector<double> d_grid = default_d_grid()) {
  if (raw.size() != psi.size()) throw ParameterError("energy table does not match state");
  if (!inst.planted()) throw StateError("Hamming bands need a planted string");
  const int n = inst.n_vars();
  const BitString g = *inst.planted();
  const std::int64_t depth = inst.planted_depth();

  // Tally mass by raw energy and by distance, then derive every statistic from the tallies.
  const auto n_c = static_cast<std::int64_t>(inst.n_constraints());
  std::vector<double> by_raw(static_cast<std::size_t>(2 * n_c + 1), 0.0);
  MeasureStats s;
  s.distance_mass.assign(static_cast<std::size_t>(n) + 1, 0.0);
  for (std::size_t m = 0; m < psi.size(); ++m) {
    const double p = std::norm(psi[m]);
    by_raw[static_cast<std::size_t>(raw[m] + n_c)] += p;
    s.distance_mass[static_cast<std::size_t>(hamming_distance(m, g))] += p;
  }

  s.q_grid = std::move(q_grid);
  s.p_q.assign(s.q_grid.size(), 0.0);
  for (std::int64_t r = -n_c; r <= n_c; ++r) {
    const double p = by_raw[static_cast<std::size_t>(r + n_c)];
    if (p == 0.0) continue;
    s.expected_energy += p * inst.normalize(r);
    for (std::size_t qi = 0; qi < s.q_grid.size(); ++qi)
      if (inst.reaches(r, s.q_grid[qi])) s.p_q[qi] += p;
    // ratio E/E_GS = -r / depth; bin = floor(20 * ratio) in exact integer arithmetic
    const std::int64_t num = -20 * r;
    std::int64_t k = num / depth;
    if ((num % depth != 0) && (num < 0)) --k;
    s.energy_bins[static_cast<int>(k)] += p;
  }

  s.d_grid = std::move(d_grid);
  s.p_d.assign(s.d_grid.size(), 0.0);
  for (std::size_t di = 0; di < s.d_grid.size(); ++di) {
    const int cut = hamming_cutoff(s.d_grid[di], n);
    for (int d = 0; d <= std::min(cut, n); ++d) s.p_d[di] += s.distance_mass[static_cast<std::size_t>(d)];
  }
  return s;
}

inline MeasureStats measure_stats(const StateVector& psi, const Instance& inst,
                                  std::vector<double> q_grid = default_q_grid(),
                                  std::vector<double> d_grid = default_d_grid()) {
  const auto raw = raw_energy_table(inst);
  return measure_stats(psi, inst, raw, std::move(q_grid), std::move(d_grid));
}

}  // namespace xorfold

#endif  // XORFOLD_SIMULATOR_HPP
