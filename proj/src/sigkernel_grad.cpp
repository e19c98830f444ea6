#include "sigcore/sigkernel_grad.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "kernel_detail.hpp"
#include "sigcore/parallel.hpp"

namespace sigcore {

namespace {

template <class T>
IncrementGram<T> gram_backward_team(const IncrementGram<T>& gram, const KernelConfig& cfg,
                                    const SolveResult<T>& forward, T cotangent, unsigned threads) {
  const std::size_t m1 = detail::fine_cells(gram.rows, cfg.dyadic_x);
  const std::size_t m2 = detail::fine_cells(gram.cols, cfg.dyadic_y);
  if (forward.rows != m1 + 1 || forward.cols != m2 + 1 ||
      forward.grid.size() != forward.rows * forward.cols) {
    throw std::invalid_argument("kernel_backward: forward grid does not match the configuration");
  }
  const T scale = static_cast<T>(dyadic_scale(cfg.dyadic_x, cfg.dyadic_y));
  const unsigned lx = cfg.dyadic_x;
  const unsigned ly = cfg.dyadic_y;
  auto p = [&](std::size_t i, std::size_t j) { return gram(i >> lx, j >> ly) * scale; };
  auto k = [&](std::size_t a, std::size_t b) { return forward.grid[a * forward.cols + b]; };

  IncrementGram<T> grad;
  grad.rows = gram.rows;
  grad.cols = gram.cols;
  grad.values.assign(gram.values.size(), T(0));

  // Nodes (a, b) with 1 <= a <= m1, 1 <= b <= m2 on anti-diagonal t = a + b,
  // swept from t = m1 + m2 down to 2. Buffers are indexed by a.
  const std::size_t stride = m1 + 2;
  std::vector<T> memory(5 * stride, T(0));
  auto adjoint = [&](std::size_t t) { return memory.data() + (t % 3) * stride; };
  auto contrib = [&](std::size_t t) { return memory.data() + (3 + t % 2) * stride; };

  const std::size_t phases = m1 + m2 - 1;
  auto diag = [&](std::size_t phase) { return m1 + m2 - phase; };
  auto first_row = [&](std::size_t t) { return t > m2 + 1 ? t - m2 : std::size_t{1}; };
  auto last_row = [&](std::size_t t) { return std::min(m1, t - 1); };
  auto length = [&](std::size_t phase) {
    const std::size_t t = diag(phase);
    return last_row(t) - first_row(t) + 1;
  };
  auto accumulate = [&](std::size_t t) {
    const T* c = contrib(t);
    for (std::size_t a = first_row(t); a <= last_row(t); ++a) {
      const std::size_t b = t - a;
      grad.values[((a - 1) >> lx) * grad.cols + ((b - 1) >> ly)] += c[a];
    }
  };
  auto serial = [&](std::size_t phase) {
    if (phase > 0) accumulate(diag(phase) + 1);
  };
  auto body = [&](std::size_t phase, std::size_t lo, std::size_t hi) {
    const std::size_t t = diag(phase);
    T* d = adjoint(t);
    const T* next = adjoint(t + 1);
    const T* next2 = adjoint(t + 2);
    T* c = contrib(t);
    const std::size_t a0 = first_row(t);
    for (std::size_t idx = lo; idx < hi; ++idx) {
      const std::size_t a = a0 + idx;
      const std::size_t b = t - a;
      T value = T(0);
      if (a == m1 && b == m2) {
        value = cotangent;
      } else {
        if (a < m1) value += next[a + 1] * goursat_a(p(a, b - 1));
        if (b < m2) value += next[a] * goursat_a(p(a - 1, b));
        if (a < m1 && b < m2) value -= next2[a + 1] * goursat_b(p(a, b));
      }
      d[a] = value;
      const T pc = p(a - 1, b - 1);
      c[a] = value * ((k(a, b - 1) + k(a - 1, b)) * goursat_da(pc) - k(a - 1, b - 1) * goursat_db(pc));
    }
  };

  WavefrontTeam(threads).sweep(phases, length, serial, body);
  accumulate(2);

  for (T& g : grad.values) g *= scale;
  return grad;
}

template <class T>
KernelGradient<T> backward_team(std::span<const T> x, std::span<const T> y, std::size_t dim,
                                const IncrementGram<T>& gram, const KernelConfig& cfg,
                                const SolveResult<T>& forward, T cotangent, unsigned threads) {
  const SolveResult<T>* fwd = &forward;
  SolveResult<T> recomputed;
  if (!forward.has_grid()) {
    if (!cfg.recompute_grid) {
      throw std::logic_error("kernel_backward: forward grid was not stored (set store_grid or "
                             "recompute_grid)");
    }
    KernelConfig solve_cfg = cfg;
    solve_cfg.store_grid = true;
    recomputed = detail::solve_goursat_team(gram, solve_cfg, 1);
    fwd = &recomputed;
  }
  const std::size_t m1 = detail::fine_cells(gram.rows, cfg.dyadic_x);
  const std::size_t m2 = detail::fine_cells(gram.cols, cfg.dyadic_y);
  const IncrementGram<T> g = gram_backward_team(
      gram, cfg, *fwd, cotangent, detail::team_size(threads, std::min(m1, m2)));

  using Matrix = detail::RowMatrix<T>;
  const Matrix dx = detail::increments(x, dim);
  const Matrix dy = detail::increments(y, dim);
  const Eigen::Map<const Matrix> G(g.values.data(), dx.rows(), dy.rows());
  const Matrix gx = G * dy;             // dF/d(dx_i)
  const Matrix gy = G.transpose() * dx; // dF/d(dy_j)

  auto telescope = [dim](const Matrix& inc) {
    const auto n = inc.rows();
    Matrix pts = Matrix::Zero(n + 1, static_cast<Eigen::Index>(dim));
    pts.bottomRows(n) += inc;
    pts.topRows(n) -= inc;
    return std::vector<T>(pts.data(), pts.data() + pts.size());
  };
  return {telescope(gx), telescope(gy)};
}

} // namespace

template <class T>
IncrementGram<T> kernel_gram_backward(const IncrementGram<T>& gram, const KernelConfig& cfg,
                                      const SolveResult<T>& forward, T cotangent) {
  const std::size_t m1 = detail::fine_cells(gram.rows, cfg.dyadic_x);
  const std::size_t m2 = detail::fine_cells(gram.cols, cfg.dyadic_y);
  return gram_backward_team(gram, cfg, forward, cotangent,
                            detail::team_size(resolve_threads(cfg.threads), std::min(m1, m2)));
}

template <class T>
KernelGradient<T> kernel_backward(std::span<const T> x, std::span<const T> y, std::size_t dim,
                                  const KernelConfig& cfg, const SolveResult<T>& forward,
                                  T cotangent) {
  return backward_team(x, y, dim, increment_gram<T>(x, y, dim), cfg, forward, cotangent,
                       resolve_threads(cfg.threads));
}

template <class T>
BatchKernelGradient<T> kernel_batch_backward(const PathBatch<T>& x, const PathBatch<T>& y,
                                             const KernelConfig& cfg,
                                             std::span<const T> cotangent) {
  validate(x, 2, "kernel_batch_backward");
  validate(y, 2, "kernel_batch_backward");
  if (x.batch() != y.batch() || x.dim() != y.dim()) {
    throw std::invalid_argument("kernel_batch_backward: batch or dimension mismatch");
  }
  if (cotangent.size() != x.batch()) {
    throw std::invalid_argument("kernel_batch_backward: need one cotangent per pair");
  }
  require_finite(x.data, "kernel_batch_backward");
  require_finite(y.data, "kernel_batch_backward");

  BatchKernelGradient<T> out{{std::vector<T>(x.shape.size()), x.shape},
                             {std::vector<T>(y.shape.size()), y.shape}};
  KernelConfig solve_cfg = cfg;
  solve_cfg.store_grid = true;
  const std::size_t dim = x.dim();
  const unsigned threads = resolve_threads(cfg.threads);
  auto run = [&](std::size_t lo, std::size_t hi, unsigned team) {
    for (std::size_t b = lo; b < hi; ++b) {
      const auto gram = increment_gram<T>(x.path(b), y.path(b), dim);
      const auto fwd = detail::solve_goursat_team(gram, solve_cfg, 1);
      const auto g =
          backward_team<T>(x.path(b), y.path(b), dim, gram, solve_cfg, fwd, cotangent[b], team);
      std::copy(g.x.begin(), g.x.end(), out.x.data.begin() + b * x.length() * dim);
      std::copy(g.y.begin(), g.y.end(), out.y.data.begin() + b * y.length() * dim);
    }
  };
  if (x.batch() >= threads) {
    parallel_for(x.batch(), threads, [&](std::size_t lo, std::size_t hi) { run(lo, hi, 1); });
  } else {
    run(0, x.batch(), threads);
  }
  return out;
}

#define SIGCORE_INSTANTIATE(T)                                                                   \
  template IncrementGram<T> kernel_gram_backward<T>(const IncrementGram<T>&, const KernelConfig&, \
                                                    const SolveResult<T>&, T);                   \
  template KernelGradient<T> kernel_backward<T>(std::span<const T>, std::span<const T>,          \
                                                std::size_t, const KernelConfig&,                \
                                                const SolveResult<T>&, T);                       \
  template BatchKernelGradient<T> kernel_batch_backward<T>(                                      \
      const PathBatch<T>&, const PathBatch<T>&, const KernelConfig&, std::span<const T>);

SIGCORE_INSTANTIATE(float)
SIGCORE_INSTANTIATE(double)

#undef SIGCORE_INSTANTIATE

} // namespace sigcore
