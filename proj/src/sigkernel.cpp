#include "sigcore/sigkernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "kernel_detail.hpp"
#include "sigcore/parallel.hpp"

namespace sigcore {

double dyadic_scale(unsigned dyadic_x, unsigned dyadic_y) {
  return std::ldexp(1.0, -static_cast<int>(dyadic_x + dyadic_y));
}

template <class T>
IncrementGram<T> increment_gram(std::span<const T> x, std::span<const T> y, std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("increment_gram: dimension must be positive");
  if (x.size() % dim != 0 || y.size() % dim != 0) {
    throw std::invalid_argument("increment_gram: path buffers do not match the dimension");
  }
  if (x.size() < 2 * dim || y.size() < 2 * dim) {
    throw std::invalid_argument("increment_gram: paths need at least two points");
  }
  const auto dx = detail::increments(x, dim);
  const auto dy = detail::increments(y, dim);
  IncrementGram<T> gram;
  gram.rows = static_cast<std::size_t>(dx.rows());
  gram.cols = static_cast<std::size_t>(dy.rows());
  gram.values.resize(gram.rows * gram.cols);
  Eigen::Map<detail::RowMatrix<T>> out(gram.values.data(), dx.rows(), dy.rows());
  out.noalias() = dx * dy.transpose();
  return gram;
}

namespace {

template <class T>
SolveResult<T> solve_full_grid(const IncrementGram<T>& gram, const KernelConfig& cfg) {
  const std::size_t m1 = detail::fine_cells(gram.rows, cfg.dyadic_x);
  const std::size_t m2 = detail::fine_cells(gram.cols, cfg.dyadic_y);
  const T scale = static_cast<T>(dyadic_scale(cfg.dyadic_x, cfg.dyadic_y));

  SolveResult<T> result;
  result.rows = m1 + 1;
  result.cols = m2 + 1;
  result.grid.assign(result.rows * result.cols, T(1));
  T* k = result.grid.data();
  const std::size_t stride = result.cols;
  for (std::size_t i = 0; i < m1; ++i) {
    const T* gram_row = gram.values.data() + (i >> cfg.dyadic_x) * gram.cols;
    T* above = k + i * stride;
    T* below = above + stride;
    for (std::size_t j = 0; j < m2; ++j) {
      const T p = gram_row[j >> cfg.dyadic_y] * scale;
      below[j + 1] = goursat_step(below[j], above[j + 1], above[j], p);
    }
  }
  result.value = result.grid.back();
  return result;
}

// Strip-wise anti-diagonal sweep.
//
// The grid is cut along its longer axis into strips of `strip_width` rows. A
// handoff row over the shorter axis holds the strip's top boundary; it starts
// as the unit boundary row and is overwritten by each strip's last row, which
// then seeds the next strip. Inside a strip the cells of one anti-diagonal are
// independent; diagonals live in three buffers selected by s mod 3.
//
// Cell (a, b) of a strip computes node (a + 1, b + 1) from nodes (a, b + 1),
// (a + 1, b) and (a, b). Only row a = 0 reads the handoff row, and row 0 is
// always the first item of a diagonal, which static_chunk hands to worker 0.
// The last-row value of diagonal s is copied into the handoff row by worker 0
// two diagonals later, once no top-row cell of this strip can still read the
// old entry. Hence the handoff row is only ever touched by worker 0.
template <class T>
SolveResult<T> solve_strips(const IncrementGram<T>& gram, const KernelConfig& cfg,
                            unsigned threads) {
  const std::size_t m1 = detail::fine_cells(gram.rows, cfg.dyadic_x);
  const std::size_t m2 = detail::fine_cells(gram.cols, cfg.dyadic_y);
  const T scale = static_cast<T>(dyadic_scale(cfg.dyadic_x, cfg.dyadic_y));

  const bool rows_are_x = m1 >= m2;
  const std::size_t long_cells = rows_are_x ? m1 : m2;
  const std::size_t short_cells = rows_are_x ? m2 : m1;
  const std::size_t width = std::min(cfg.strip_width, long_cells);
  const std::size_t strips = (long_cells + width - 1) / width;
  const std::size_t full_diagonals = width + short_cells - 1;
  const std::size_t last_width = long_cells - (strips - 1) * width;
  const std::size_t phases = (strips - 1) * full_diagonals + last_width + short_cells - 1;

  std::vector<T> memory(short_cells + 1 + 3 * width, T(1));
  T* handoff = memory.data();
  T* diagonals = handoff + short_cells + 1;
  auto diagonal = [&](std::size_t s) { return diagonals + (s % 3) * width; };

  auto coeff = [&](std::size_t row, std::size_t col) {
    const T g = rows_are_x ? gram(row >> cfg.dyadic_x, col >> cfg.dyadic_y)
                           : gram(col >> cfg.dyadic_x, row >> cfg.dyadic_y);
    return g * scale;
  };

  struct Step {
    std::size_t strip;
    std::size_t s;
    std::size_t rows;
  };
  auto locate = [&](std::size_t phase) {
    const std::size_t strip = phase / full_diagonals;
    return Step{strip, phase % full_diagonals, strip + 1 == strips ? last_width : width};
  };
  auto first_row = [&](const Step& st) {
    return st.s + 1 > short_cells ? st.s + 1 - short_cells : 0;
  };
  auto length = [&](std::size_t phase) {
    const Step st = locate(phase);
    return std::min(st.rows - 1, st.s) - first_row(st) + 1;
  };
  auto flush = [&](std::size_t s, std::size_t rows) {
    if (s + 1 < rows) return;
    handoff[s - (rows - 1) + 1] = diagonal(s)[rows - 1];
  };
  auto serial = [&](std::size_t phase) {
    const Step st = locate(phase);
    if (st.s >= 2) {
      flush(st.s - 2, st.rows);
    } else if (st.s == 0 && st.strip > 0) {
      for (std::size_t s = full_diagonals - std::min<std::size_t>(2, full_diagonals);
           s < full_diagonals; ++s) {
        flush(s, width);
      }
    }
  };
  auto body = [&](std::size_t phase, std::size_t lo, std::size_t hi) {
    const Step st = locate(phase);
    const std::size_t a0 = first_row(st);
    T* cur = diagonal(st.s);
    const T* prev = diagonal(st.s + 2);  // s - 1
    const T* prev2 = diagonal(st.s + 1); // s - 2
    const std::size_t row0 = st.strip * width;
    for (std::size_t idx = lo; idx < hi; ++idx) {
      const std::size_t a = a0 + idx;
      const std::size_t b = st.s - a;
      const T up = a == 0 ? handoff[b + 1] : prev[a - 1];
      const T left = b == 0 ? T(1) : prev[a];
      const T corner = a == 0 ? handoff[b] : (b == 0 ? T(1) : prev2[a - 1]);
      const T p = coeff(row0 + a, b);
      cur[a] = goursat_step(left, up, corner, p);
    }
  };

  WavefrontTeam(threads).sweep(phases, length, serial, body);

  SolveResult<T> result;
  result.value = diagonal(last_width + short_cells - 2)[last_width - 1];
  return result;
}

} // namespace

namespace detail {

template <class T>
SolveResult<T> solve_goursat_team(const IncrementGram<T>& gram, const KernelConfig& cfg,
                                  unsigned threads) {
  if (gram.rows == 0 || gram.cols == 0 || gram.values.size() != gram.rows * gram.cols) {
    throw std::invalid_argument("solve_goursat: malformed increment Gram matrix");
  }
  if (cfg.strip_width == 0) throw std::invalid_argument("solve_goursat: strip width must be positive");
  if (cfg.store_grid) return solve_full_grid(gram, cfg);
  const std::size_t m1 = fine_cells(gram.rows, cfg.dyadic_x);
  const std::size_t m2 = fine_cells(gram.cols, cfg.dyadic_y);
  const std::size_t diagonal = std::min({cfg.strip_width, m1, m2});
  return solve_strips(gram, cfg, team_size(threads, diagonal));
}

} // namespace detail

template <class T>
SolveResult<T> solve_goursat(const IncrementGram<T>& gram, const KernelConfig& cfg) {
  return detail::solve_goursat_team(gram, cfg, resolve_threads(cfg.threads));
}

namespace {

template <class T>
void check_pair(const PathBatch<T>& x, const PathBatch<T>& y, const char* who) {
  validate(x, 2, who);
  validate(y, 2, who);
  if (x.dim() != y.dim()) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  require_finite(x.data, who);
  require_finite(y.data, who);
}

// Solves every (a, b) pair in `pairs` and stores the value through `store`.
// Pairs are spread over workers when there are enough of them; otherwise the
// pairs run one after another, each with the whole team inside the solve.
template <class T, class Pairs, class Store>
void solve_pairs(const PathBatch<T>& x, const PathBatch<T>& y, const KernelConfig& cfg,
                 std::size_t count, Pairs&& pair, Store&& store) {
  const unsigned threads = resolve_threads(cfg.threads);
  KernelConfig solve_cfg = cfg;
  solve_cfg.store_grid = false;
  auto run = [&](std::size_t lo, std::size_t hi, unsigned team) {
    for (std::size_t n = lo; n < hi; ++n) {
      const auto [a, b] = pair(n);
      const auto gram = increment_gram<T>(x.path(a), y.path(b), x.dim());
      store(n, detail::solve_goursat_team(gram, solve_cfg, team).value);
    }
  };
  if (count >= threads) {
    parallel_for(count, threads, [&](std::size_t lo, std::size_t hi) { run(lo, hi, 1); });
  } else {
    run(0, count, threads);
  }
}

} // namespace

template <class T>
std::vector<T> kernel_batch(const PathBatch<T>& x, const PathBatch<T>& y, const KernelConfig& cfg) {
  check_pair(x, y, "kernel_batch");
  if (x.batch() != y.batch()) throw std::invalid_argument("kernel_batch: batch size mismatch");
  std::vector<T> out(x.batch());
  solve_pairs(
      x, y, cfg, x.batch(), [](std::size_t n) { return std::pair{n, n}; },
      [&](std::size_t n, T v) { out[n] = v; });
  return out;
}

template <class T>
std::vector<T> kernel_gram(const PathBatch<T>& x, const PathBatch<T>& y, const KernelConfig& cfg) {
  if (x.data.data() == y.data.data() && x.shape == y.shape) return kernel_gram(x, cfg);
  check_pair(x, y, "kernel_gram");
  const std::size_t cols = y.batch();
  std::vector<T> out(x.batch() * cols);
  solve_pairs(
      x, y, cfg, out.size(), [&](std::size_t n) { return std::pair{n / cols, n % cols}; },
      [&](std::size_t n, T v) { out[n] = v; });
  return out;
}

template <class T>
std::vector<T> kernel_gram(const PathBatch<T>& x, const KernelConfig& cfg) {
  check_pair(x, x, "kernel_gram");
  const std::size_t n = x.batch();
  std::vector<std::pair<std::size_t, std::size_t>> upper;
  upper.reserve(n * (n + 1) / 2);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) upper.emplace_back(a, b);
  }
  std::vector<T> out(n * n);
  solve_pairs(
      x, x, cfg, upper.size(), [&](std::size_t i) { return upper[i]; },
      [&](std::size_t i, T v) {
        const auto [a, b] = upper[i];
        out[a * n + b] = v;
        out[b * n + a] = v;
      });
  return out;
}

#define SIGCORE_INSTANTIATE(T)                                                                   \
  template IncrementGram<T> increment_gram<T>(std::span<const T>, std::span<const T>,            \
                                              std::size_t);                                      \
  template SolveResult<T> solve_goursat<T>(const IncrementGram<T>&, const KernelConfig&);        \
  template SolveResult<T> detail::solve_goursat_team<T>(const IncrementGram<T>&,                 \
                                                        const KernelConfig&, unsigned);          \
  template std::vector<T> kernel_batch<T>(const PathBatch<T>&, const PathBatch<T>&,              \
                                          const KernelConfig&);                                  \
  template std::vector<T> kernel_gram<T>(const PathBatch<T>&, const PathBatch<T>&,               \
                                         const KernelConfig&);                                   \
  template std::vector<T> kernel_gram<T>(const PathBatch<T>&, const KernelConfig&);

SIGCORE_INSTANTIATE(float)
SIGCORE_INSTANTIATE(double)

#undef SIGCORE_INSTANTIATE

} // namespace sigcore
