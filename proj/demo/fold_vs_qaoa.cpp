// One planted instance, three protocols: probability of landing at or below
// q * E_GS for each q on the default grid.
//
//   demo_fold_vs_qaoa [N] [seed]

#include <cstdio>
#include <cstdlib>

#include "xorfold/protocols.hpp"

using namespace xorfold;

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 12;
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;
  if (n < 6 || n > 20) {
    std::fprintf(stderr, "N must be in [6, 20]\n");
    return 2;
  }
  const auto inst = generate_ppsp(n, 4 * n, 0.1, seed);
  std::printf("N = %d, N_C = %d, epsilon = 0.1, seed = %llu\n\n", n, inst.n_constraints(),
              static_cast<unsigned long long>(seed));

  const auto qaoa = runtime_average(inst, default_schedule(ProtocolKind::qaoa, n), 8);
  const auto fold = runtime_average(inst, default_schedule(ProtocolKind::fold_aqc_quad, n, 0.75), 8);
  const auto tma_sched = default_schedule(ProtocolKind::tma_3xor, n, 0.85);
  const auto lowering = default_lowering(inst, ProtocolKind::tma_3xor, seed);
  const auto tma = runtime_average(inst, tma_sched, 8, &lowering);
  const auto uniform = measure_stats(init_state(n, InitKind::uniform), inst);

  std::printf("    q   random     QAOA  fold A=0.75  TMA A=0.85\n");
  for (std::size_t i = 0; i < qaoa.q_grid.size(); ++i)
    std::printf("%5.2f  %7.4f  %7.4f  %11.4f  %10.4f\n", qaoa.q_grid[i], uniform.p_q[i], qaoa.p_q[i], fold.p_q[i], tma.p_q[i]);
  std::printf("\nmean energy / N: QAOA %.3f, fold %.3f, TMA %.3f\n", qaoa.expected_energy / n, fold.expected_energy / n,
              tma.expected_energy / n);
  return 0;
}
