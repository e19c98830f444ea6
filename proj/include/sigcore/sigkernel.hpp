#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sigcore/path.hpp"

namespace sigcore {

struct KernelConfig {
  unsigned dyadic_x = 0;        // refinement order of the first path's axis
  unsigned dyadic_y = 0;        // refinement order of the second path's axis
  std::size_t strip_width = 32; // fine rows per strip in the wavefront sweep
  bool store_grid = false;      // keep the full fine grid (needed by gradients)
  bool recompute_grid = false;  // kernel_backward may re-solve when no grid is stored
  unsigned threads = 0;         // 0: see resolve_threads
};

// Delta[i, j] = <x_{i+1} - x_i, y_{j+1} - y_j> at data resolution.
template <class T>
struct IncrementGram {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> values; // row-major rows x cols

  T operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

template <class T>
struct SolveResult {
  T value = T(1);
  // (rows x cols) row-major fine grid, rows = 2^dyadic_x (L1 - 1) + 1 and
  // cols = 2^dyadic_y (L2 - 1) + 1; empty unless store_grid was requested.
  std::vector<T> grid;
  std::size_t rows = 0;
  std::size_t cols = 0;

  bool has_grid() const noexcept { return !grid.empty(); }
  T at(std::size_t i, std::size_t j) const { return grid[i * cols + j]; }
};

// Coefficients of the second-order update
//   k[i+1][j+1] = (k[i+1][j] + k[i][j+1]) A(p) - k[i][j] B(p)
// and their derivatives.
template <class T>
constexpr T goursat_a(T p) noexcept { return T(1) + p * (T(0.5) + p / T(12)); }
template <class T>
constexpr T goursat_b(T p) noexcept { return T(1) - p * p / T(12); }

// The update above, grouped as
//   (left + up)(1 + p/2) - corner + (p^2/12)(left + up + corner)
// which keeps the leading terms free of rounding (one cell with p = 1 gives
// exactly 2.25).
template <class T>
constexpr T goursat_step(T left, T up, T corner, T p) noexcept {
  const T side = left + up;
  return side * (T(1) + p * T(0.5)) - corner + p * p / T(12) * (side + corner);
}

template <class T>
constexpr T goursat_da(T p) noexcept { return T(0.5) + p / T(6); }
template <class T>
constexpr T goursat_db(T p) noexcept { return -p / T(6); }

// Factor applied to a coarse Delta entry when read on the refined grid: each
// data increment is split into 2^dyadic equal pieces along its axis.
double dyadic_scale(unsigned dyadic_x, unsigned dyadic_y);

// Increment Gram matrix of two single paths given as (L x dim) row-major
// buffers, formed as one dense product dx * dy^T.
template <class T>
IncrementGram<T> increment_gram(std::span<const T> x, std::span<const T> y, std::size_t dim);

// Solves the discretized Goursat problem on the dyadically refined grid. With
// store_grid unset the sweep keeps three anti-diagonals of one strip plus one
// handoff row along the shorter axis, so working memory does not grow with
// the longer axis. Both sweeps give bit-identical values.
template <class T>
SolveResult<T> solve_goursat(const IncrementGram<T>& gram, const KernelConfig& cfg);

// k(X_b, Y_b) for every b.
template <class T>
std::vector<T> kernel_batch(const PathBatch<T>& x, const PathBatch<T>& y, const KernelConfig& cfg);

// Gram matrix G[a, b] = k(X_a, Y_b), row-major B1 x B2.
template <class T>
std::vector<T> kernel_gram(const PathBatch<T>& x, const PathBatch<T>& y, const KernelConfig& cfg);

// Symmetric Gram matrix of one batch: only the upper triangle is solved and
// then mirrored.
template <class T>
std::vector<T> kernel_gram(const PathBatch<T>& x, const KernelConfig& cfg);

} // namespace sigcore
