#pragma once

#include <span>
#include <vector>

#include "sigcore/sigkernel.hpp"

namespace sigcore {

template <class T>
struct KernelGradient {
  std::vector<T> x; // L1 x d
  std::vector<T> y; // L2 x d
};

// dF/dDelta for one solve, on the coarse (data-resolution) grid, given the
// stored forward grid and the scalar cotangent dF/dk.
//
// Runs the adjoint of the solver's update backwards over the fine grid, one
// anti-diagonal at a time:
//   D[a][b] = D[a+1][b] A(p[a][b-1]) + D[a][b+1] A(p[a-1][b]) - D[a+1][b+1] B(p[a][b])
// with D = 0 outside the grid and D at the final corner equal to the
// cotangent. Each fine cell then contributes
//   D[i+1][j+1] ((k[i+1][j] + k[i][j+1]) A'(p) - k[i][j] B'(p))
// to the coarse cell containing it. Contributions are added in a fixed order
// (diagonals descending, rows ascending) whatever the thread count.
template <class T>
IncrementGram<T> kernel_gram_backward(const IncrementGram<T>& gram, const KernelConfig& cfg,
                                      const SolveResult<T>& forward, T cotangent);

// Gradients of F with respect to both paths ((L1 x d) and (L2 x d) row-major
// buffers). `forward` must come from solve_goursat with the same config and
// store_grid set; without a grid the call throws std::logic_error unless
// cfg.recompute_grid is set, in which case the grid is solved again.
template <class T>
KernelGradient<T> kernel_backward(std::span<const T> x, std::span<const T> y, std::size_t dim,
                                  const KernelConfig& cfg, const SolveResult<T>& forward,
                                  T cotangent);

template <class T>
struct BatchKernelGradient {
  PathArray<T> x;
  PathArray<T> y;
};

// Batched forward + backward: dF/dX and dF/dY for F with dF/dk_b = cot[b].
// Each pair stores its fine grid only for the duration of its own backward
// pass.
template <class T>
BatchKernelGradient<T> kernel_batch_backward(const PathBatch<T>& x, const PathBatch<T>& y,
                                             const KernelConfig& cfg,
                                             std::span<const T> cotangent);

} // namespace sigcore
