#ifndef XORFOLD_GRIDS_HPP
#define XORFOLD_GRIDS_HPP

#include <cmath>
#include <vector>

namespace xorfold {

/// Approximation ratios q = 0.25, 0.30, ..., 0.85 followed by q = 1 (ground
/// state). Built from integers so every entry is the closest double to its
/// decimal value.
inline std::vector<double> default_q_grid() {
  std::vector<double> q;
  for (int c = 25; c <= 85; c += 5) q.push_back(c / 100.0);
  q.push_back(1.0);
  return q;
}

/// Hamming-distance fractions d used for P(D_H(m, G) <= d N).
inline std::vector<double> default_d_grid() { return {0.0, 1.0 / 8, 1.0 / 5, 1.0 / 4, 1.0 / 3, 2.0 / 5}; }

/// Largest integer distance counted for fraction d at size n.
inline int hamming_cutoff(double d, int n) { return static_cast<int>(std::floor(d * n + 1e-9)); }

}  // namespace xorfold

#endif  // XORFOLD_GRIDS_HPP
