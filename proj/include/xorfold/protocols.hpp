#ifndef XORFOLD_PROTOCOLS_HPP
#define XORFOLD_PROTOCOLS_HPP

// QAOA, spectrally folded AQC and trial minimum annealing (TMA).
//
// Every layer follows psi <- exp(-2 pi i f dt H_D) exp(-2 pi i g dt H_cost) psi
// with the diagonal applied first. A stage of duration T is cut into
// ceil(T / dt) equal steps and each step samples the schedule at its midpoint.

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "xorfold/errors.hpp"
#include "xorfold/greedy.hpp"
#include "xorfold/instance.hpp"
#include "xorfold/random.hpp"
#include "xorfold/simulator.hpp"

namespace xorfold {

enum class ProtocolKind { qaoa, fold_aqc_quad, fold_aqc_lin, tma_3xor, tma_localz };

inline std::string to_string(ProtocolKind k) {
  switch (k) {
    case ProtocolKind::qaoa: return "qaoa";
    case ProtocolKind::fold_aqc_quad: return "fold_aqc_quad";
    case ProtocolKind::fold_aqc_lin: return "fold_aqc_lin";
    case ProtocolKind::tma_3xor: return "tma_3xor";
    case ProtocolKind::tma_localz: return "tma_localz";
  }
  return "?";
}

inline ProtocolKind protocol_from_string(const std::string& s) {
  if (s == "qaoa") return ProtocolKind::qaoa;
  if (s == "fold_aqc_quad") return ProtocolKind::fold_aqc_quad;
  if (s == "fold_aqc_lin") return ProtocolKind::fold_aqc_lin;
  if (s == "tma_3xor") return ProtocolKind::tma_3xor;
  if (s == "tma_localz") return ProtocolKind::tma_localz;
  throw ParameterError("unknown protocol '" + s + "'");
}

inline bool is_fold_aqc(ProtocolKind k) { return k == ProtocolKind::fold_aqc_quad || k == ProtocolKind::fold_aqc_lin; }
inline bool is_tma(ProtocolKind k) { return k == ProtocolKind::tma_3xor || k == ProtocolKind::tma_localz; }

enum class RampShape { sin2, linear };

struct Schedule {
  ProtocolKind kind = ProtocolKind::qaoa;
  double t_f = 1.0;
  double dt = 0.05;
  double A = 1.0;      // fold target (fold_aqc, tma)
  double kappa = 1.3;  // mixer strength outside the ramps (tma)
  double t_r = 0.0;    // ramp duration (tma)
  double runtime_multiplier = 1.0;
  RampShape ramp = RampShape::sin2;

  void validate() const {
    if (!(t_f > 0.0) || !(dt > 0.0)) throw ParameterError("t_f and dt must be positive");
    if (!(runtime_multiplier > 0.0)) throw ParameterError("runtime multiplier must be positive");
    if ((is_fold_aqc(kind) || is_tma(kind)) && !(A > 0.0 && A <= 1.0)) throw ParameterError("A must be in (0, 1]");
    if (is_tma(kind) && (!(kappa > 0.0) || !(t_r >= 0.0))) throw ParameterError("tma needs kappa > 0 and t_r >= 0");
  }
};

/// Customary timing for each protocol at size n.
inline Schedule default_schedule(ProtocolKind kind, int n, double A = 1.0) {
  Schedule s;
  s.kind = kind;
  s.A = A;
  switch (kind) {
    case ProtocolKind::qaoa:
      s.t_f = n / 32.0;
      s.dt = 0.05;
      break;
    case ProtocolKind::fold_aqc_quad:
    case ProtocolKind::fold_aqc_lin:
      s.t_f = n / 24.0;
      s.dt = 0.0325;
      break;
    case ProtocolKind::tma_3xor:
    case ProtocolKind::tma_localz:
      s.t_f = n / 12.0;
      s.dt = 0.025;
      s.kappa = 1.3;
      s.t_r = kind == ProtocolKind::tma_3xor ? n / 24.0 : n / 12.0;
      break;
  }
  return s;
}

/// ceil(duration / dt), tolerant of representation error in exact multiples.
inline long step_count(double duration, double dt) {
  if (duration <= 0.0) return 0;
  return static_cast<long>(std::ceil(duration / dt - 1e-9));
}

/// Evenly spaced runtime multipliers over [2/3, 4/3]; a single point sits at 1.
inline std::vector<double> runtime_multipliers(int grid_size) {
  if (grid_size < 1) throw ParameterError("runtime grid size must be at least 1");
  if (grid_size == 1) return {1.0};
  std::vector<double> out;
  for (int i = 0; i < grid_size; ++i) out.push_back(2.0 / 3.0 + (2.0 / 3.0) * i / (grid_size - 1));
  return out;
}

/// Tables a protocol needs, built once per (instance, A, lowering).
struct ProtocolTables {
  std::vector<std::int32_t> raw;      // problem raw energies
  DiagonalTable cost;                 // problem or folded table
  std::vector<double> lowering;       // raw lowering energies (tma only)
};

inline TableKind cost_table_kind(ProtocolKind k) {
  switch (k) {
    case ProtocolKind::qaoa: return TableKind::problem;
    case ProtocolKind::fold_aqc_quad: return TableKind::folded_quadratic;
    default: return TableKind::folded_linear;
  }
}

inline ProtocolTables prepare_tables(const Instance& inst, const Schedule& sched,
                                     const LoweringHamiltonian* lowering = nullptr) {
  sched.validate();
  if (inst.n_vars() > kMaxQubits) throw ResourceError("instance exceeds qubit cap");
  if (is_tma(sched.kind) && !lowering) throw ParameterError("tma needs a lowering Hamiltonian");
  ProtocolTables t;
  t.raw = raw_energy_table(inst);
  t.cost = build_diagonal(inst, t.raw, cost_table_kind(sched.kind), sched.A);
  if (is_tma(sched.kind)) {
    if (lowering->n != inst.n_vars()) throw ParameterError("lowering size does not match instance");
    t.cost.kind = TableKind::folded_linear;
    const auto lr = lowering_raw_table(*lowering);
    t.lowering.assign(lr.begin(), lr.end());
  }
  return t;
}

namespace detail {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Schedule-driven sweep: g(t) on the diagonal, f(t) on the mixer, t in [0, T).
template <class F, class G>
void sweep(StateVector& psi, std::span<const double> table, double total, double dt, F f, G g) {
  const long steps = step_count(total, dt);
  if (steps == 0) return;
  const double h = total / static_cast<double>(steps);
  for (long s = 0; s < steps; ++s) {
    const double t = (static_cast<double>(s) + 0.5) * h;
    apply_phase(psi, table, kTwoPi * g(t) * h);
    apply_mixer(psi, kTwoPi * f(t) * h);
  }
}

inline double ramp_profile(RampShape shape, double x) {
  // x in [0, 1]: 0 at the start of the ramp-up, 1 at full strength
  if (shape == RampShape::linear) return x;
  const double s = std::sin(std::numbers::pi * x / 2.0);
  return s * s;
}

}  // namespace detail

inline StateVector run_qaoa(const Instance& inst, const Schedule& sched, const ProtocolTables& tables) {
  if (sched.kind != ProtocolKind::qaoa) throw ParameterError("run_qaoa needs a qaoa schedule");
  const double tf = sched.t_f * sched.runtime_multiplier;
  auto psi = init_state(inst.n_vars(), InitKind::uniform);
  detail::sweep(psi, tables.cost.values, tf, sched.dt,
                [tf](double t) { return std::sqrt(1.0 - t / tf); },
                [tf](double t) { return std::sqrt(t / tf); });
  return psi;
}

inline StateVector run_qaoa(const Instance& inst, const Schedule& sched) {
  if (sched.kind != ProtocolKind::qaoa) throw ParameterError("run_qaoa needs a qaoa schedule");
  return run_qaoa(inst, sched, prepare_tables(inst, sched));
}

inline StateVector run_fold_aqc(const Instance& inst, const Schedule& sched, const ProtocolTables& tables) {
  if (!is_fold_aqc(sched.kind)) throw ParameterError("run_fold_aqc needs a fold_aqc schedule");
  const double tf = sched.t_f * sched.runtime_multiplier;
  auto psi = init_state(inst.n_vars(), InitKind::uniform);
  detail::sweep(psi, tables.cost.values, tf, sched.dt,
                [tf](double t) { return std::pow(1.0 - t / tf, 0.25); },
                [tf](double t) { return std::sqrt(t / tf); });
  return psi;
}

inline StateVector run_fold_aqc(const Instance& inst, const Schedule& sched) {
  if (!is_fold_aqc(sched.kind)) throw ParameterError("run_fold_aqc needs a fold_aqc schedule");
  return run_fold_aqc(inst, sched, prepare_tables(inst, sched));
}

/// Three stages from |L>: ramp the mixer up with the lowering term at C_0,
/// hold the mixer while C falls linearly to zero, then ramp the mixer down.
inline StateVector run_tma(const Instance& inst, const Schedule& sched, const LoweringHamiltonian& lowering,
                           const ProtocolTables& tables) {
  if (!is_tma(sched.kind)) throw ParameterError("run_tma needs a tma schedule");
  if (tables.lowering.size() != tables.cost.values.size()) throw ParameterError("tables lack a lowering term");
  const double tf = sched.t_f * sched.runtime_multiplier;
  const double tr = sched.t_r;
  const double c0 = lowering.c0;
  const double kappa = sched.kappa;
  const auto& cost = tables.cost.values;
  const auto& low = tables.lowering;
  auto psi = init_state(inst.n_vars(), InitKind::basis, lowering.anchor);

  auto stage = [&](double total, auto mixer_strength, auto coeff) {
    const long steps = step_count(total, sched.dt);
    if (steps == 0) return;
    const double h = total / static_cast<double>(steps);
    for (long s = 0; s < steps; ++s) {
      const double t = (static_cast<double>(s) + 0.5) * h;
      apply_phase(psi, cost, low, coeff(t), detail::kTwoPi * h);
      apply_mixer(psi, detail::kTwoPi * mixer_strength(t) * h);
    }
  };
  stage(tr, [&](double t) { return kappa * detail::ramp_profile(sched.ramp, t / tr); }, [&](double) { return c0; });
  stage(tf, [&](double) { return kappa; }, [&](double t) { return c0 * (1.0 - t / tf); });
  stage(tr, [&](double t) { return kappa * detail::ramp_profile(sched.ramp, (tr - t) / tr); },
        [](double) { return 0.0; });
  return psi;
}

inline StateVector run_tma(const Instance& inst, const Schedule& sched, const LoweringHamiltonian& lowering) {
  if (!is_tma(sched.kind)) throw ParameterError("run_tma needs a tma schedule");
  return run_tma(inst, sched, lowering, prepare_tables(inst, sched, &lowering));
}

/// Local minimum used as the TMA start: one greedy descent from a random string.
inline BitString find_anchor(const Instance& inst, std::uint64_t seed) {
  Rng rng(seed);
  const BitString start = rng.bits(inst.n_vars());
  return greedy_descent(inst, start, GreedyConfig{}, rng).string;
}

inline LoweringKind lowering_kind_for(ProtocolKind k) {
  if (k == ProtocolKind::tma_3xor) return LoweringKind::xor3;
  if (k == ProtocolKind::tma_localz) return LoweringKind::local_z;
  throw ParameterError("protocol has no lowering term");
}

/// Lowering term for a TMA run on `inst`, anchored at a greedy local minimum.
/// Anchor and lowering triples draw from streams derived from `seed`.
inline LoweringHamiltonian default_lowering(const Instance& inst, ProtocolKind kind, std::uint64_t seed) {
  const BitString anchor = find_anchor(inst, derive_seed(seed, 0x616e63686f72ULL));
  return make_lowering(inst, lowering_kind_for(kind), anchor, derive_seed(seed, 0x6c6f776572ULL));
}

inline StateVector run_protocol(const Instance& inst, const Schedule& sched, const ProtocolTables& tables,
                                const LoweringHamiltonian* lowering = nullptr) {
  if (sched.kind == ProtocolKind::qaoa) return run_qaoa(inst, sched, tables);
  if (is_fold_aqc(sched.kind)) return run_fold_aqc(inst, sched, tables);
  if (!lowering) throw ParameterError("tma needs a lowering Hamiltonian");
  return run_tma(inst, sched, *lowering, tables);
}

/// Equal-weight average of the measured masses over the runtime grid.
inline MeasureStats runtime_average(const Instance& inst, const Schedule& sched, int grid_size,
                                    const LoweringHamiltonian* lowering = nullptr,
                                    std::vector<double> q_grid = default_q_grid(),
                                    std::vector<double> d_grid = default_d_grid()) {
  const auto mults = runtime_multipliers(grid_size);
  const auto tables = prepare_tables(inst, sched, lowering);
  MeasureStats avg;
  for (std::size_t r = 0; r < mults.size(); ++r) {
    Schedule s = sched;
    s.runtime_multiplier = sched.runtime_multiplier * mults[r];
    const auto psi = run_protocol(inst, s, tables, lowering);
    auto st = measure_stats(psi, inst, tables.raw, q_grid, d_grid);
    if (r == 0) {
      avg = std::move(st);
      continue;
    }
    for (std::size_t i = 0; i < avg.p_q.size(); ++i) avg.p_q[i] += st.p_q[i];
    for (std::size_t i = 0; i < avg.p_d.size(); ++i) avg.p_d[i] += st.p_d[i];
    for (std::size_t i = 0; i < avg.distance_mass.size(); ++i) avg.distance_mass[i] += st.distance_mass[i];
    for (const auto& [k, p] : st.energy_bins) avg.energy_bins[k] += p;
    avg.expected_energy += st.expected_energy;
  }
  const double w = 1.0 / static_cast<double>(mults.size());
  for (auto& p : avg.p_q) p *= w;
  for (auto& p : avg.p_d) p *= w;
  for (auto& p : avg.distance_mass) p *= w;
  for (auto& [k, p] : avg.energy_bins) p *= w;
  avg.expected_energy *= w;
  return avg;
}

}  // namespace xorfold

#endif  // XORFOLD_PROTOCOLS_HPP
