#include "sigcore/signature_grad.hpp"

#include <algorithm>
#include <stdexcept>

#include "sigcore/parallel.hpp"

namespace sigcore {

namespace {

// Scratch for one path; carved out of a single allocation per worker.
template <class T>
struct BackwardWorkspace {
  explicit BackwardWorkspace(const TensorShape& shape)
      : storage(4 * shape.total() + shape.level_size(shape.depth()) + 3 * shape.dim()) {
    const std::size_t total = shape.total();
    const std::size_t d = shape.dim();
    std::span<T> all(storage);
    sig = all.subspan(0, total);
    grad_sig = all.subspan(total, total);
    seg = all.subspan(2 * total, total);
    grad_seg = all.subspan(3 * total, total);
    z = all.subspan(4 * total, d);
    neg_z = all.subspan(4 * total + d, d);
    grad_z = all.subspan(4 * total + 2 * d, d);
    horner = all.subspan(4 * total + 3 * d);
  }

  // stream_signature wants [z | scratch] contiguous. Both layouts reuse
  // buffers that are free until the backward sweep starts.
  std::span<T> forward_scratch(SigMethod method, const TensorShape& shape) {
    if (method == SigMethod::direct) {
      return std::span<T>(seg.data(), direct_workspace_size(shape));
    }
    return std::span<T>(grad_z.data(), horner_workspace_size(shape));
  }

  std::vector<T> storage;
  std::span<T> sig;      // running signature S(x_1..l+1), peeled in place
  std::span<T> grad_sig; // dF/dS for the current prefix
  std::span<T> seg;      // exp(z_l)
  std::span<T> grad_seg; // dF/d exp(z_l)
  std::span<T> z;
  std::span<T> neg_z;
  std::span<T> grad_z;
  std::span<T> horner;
};

// Given C = A (x) E with dF/dC in `grad`, writes dF/dE into `grad_e` and
// replaces `grad` with dF/dA. `a` is the left factor, `e` the right factor.
template <class T>
void chen_backward(std::span<const T> a, std::span<const T> e, std::span<T> grad,
                   std::span<T> grad_e, const TensorShape& shape) {
  const std::size_t N = shape.depth();

  // dF/dE_j = dF/dC_j + sum_i contraction of dF/dC_{i+j} with A_i on the left.
  std::copy(grad.begin(), grad.end(), grad_e.begin());
  for (std::size_t j = 1; j < N; ++j) {
    T* out = grad_e.data() + shape.offset(j);
    const std::size_t m = shape.level_size(j);
    for (std::size_t i = 1; i + j <= N; ++i) {
      const T* ai = a.data() + shape.offset(i);
      const T* g = grad.data() + shape.offset(i + j);
      const std::size_t n = shape.level_size(i);
      for (std::size_t I = 0; I < n; ++I) {
        const T w = ai[I];
        const T* row = g + I * m;
        for (std::size_t J = 0; J < m; ++J) out[J] += w * row[J];
      }
    }
  }

  // dF/dA_i = dF/dC_i + sum_j contraction of dF/dC_{i+j} with E_j on the
  // right. Ascending i only reads levels above i, which are still dF/dC.
  for (std::size_t i = 1; i < N; ++i) {
    T* out = grad.data() + shape.offset(i);
    const std::size_t n = shape.level_size(i);
    for (std::size_t j = 1; i + j <= N; ++j) {
      const T* ej = e.data() + shape.offset(j);
      const T* g = grad.data() + shape.offset(i + j);
      const std::size_t m = shape.level_size(j);
      for (std::size_t I = 0; I < n; ++I) {
        const T* row = g + I * m;
        T acc = T(0);
        for (std::size_t J = 0; J < m; ++J) acc += row[J] * ej[J];
        out[I] += acc;
      }
    }
  }
}

// Backpropagates dF/d exp(z) (destroyed) into dF/dz, following the forward
// recurrence E_k = (E_{k-1} / k) (x) z.
template <class T>
void exp_backward(std::span<const T> z, std::span<const T> e, std::span<T> grad_e,
                  std::span<T> grad_z, const TensorShape& shape) {
  const std::size_t d = shape.dim();
  std::fill(grad_z.begin(), grad_z.end(), T(0));
  for (std::size_t k = shape.depth(); k >= 2; --k) {
    const T inv = T(1) / static_cast<T>(k);
    const T* prev = e.data() + shape.offset(k - 1);
    T* grad_prev = grad_e.data() + shape.offset(k - 1);
    const T* g = grad_e.data() + shape.offset(k);
    const std::size_t n = shape.level_size(k - 1);
    for (std::size_t I = 0; I < n; ++I) {
      const T* row = g + I * d;
      T acc = T(0);
      for (std::size_t j = 0; j < d; ++j) {
        acc += row[j] * z[j];
        grad_z[j] += row[j] * prev[I] * inv;
      }
      grad_prev[I] += acc * inv;
    }
  }
  for (std::size_t j = 0; j < d; ++j) grad_z[j] += grad_e[j];
}

template <class T>
void path_backward(const IncrementStream<T>& stream, SigMethod method, const TensorShape& shape,
                   std::span<const T> cotangent, BackwardWorkspace<T>& ws,
                   std::span<T> grad_points) {
  std::fill(grad_points.begin(), grad_points.end(), T(0));
  const std::size_t steps = stream.steps();
  if (steps == 0) return;

  detail::stream_signature<T>(stream, method, shape, ws.forward_scratch(method, shape), ws.sig);
  std::copy(cotangent.begin(), cotangent.end(), ws.grad_sig.begin());

  const std::size_t d = shape.dim();
  for (std::size_t step = steps; step-- > 0;) {
    stream.fill(step, ws.z);

    // Peel the last segment off: sig becomes the prefix signature.
    if (step == 0) {
      std::fill(ws.sig.begin(), ws.sig.end(), T(0));
    } else if (!detail::is_zero<T>(ws.z)) {
      for (std::size_t j = 0; j < d; ++j) ws.neg_z[j] = -ws.z[j];
      detail::horner_step<T>(ws.sig, ws.neg_z, ws.horner, shape);
    }

    tensor_exp<T>(ws.z, shape, ws.seg);
    chen_backward<T>(ws.sig, ws.seg, ws.grad_sig, ws.grad_seg, shape);
    exp_backward<T>(ws.z, ws.seg, ws.grad_seg, ws.grad_z, shape);
    stream.scatter_adjoint(step, ws.grad_z, grad_points);
  }
}

} // namespace

template <class T>
std::vector<T> signature_backward(const PathBatch<T>& batch, const SigOptions& opts,
                                  std::span<const T> cotangent) {
  validate(batch, 2, "signature_backward");
  require_finite(batch.data, "signature_backward");
  require_finite(batch.times, "signature_backward");
  const TensorShape shape = signature_shape(batch.dim(), opts);
  const std::size_t total = shape.total();
  if (cotangent.size() != batch.batch() * total) {
    throw std::invalid_argument("signature_backward: cotangent does not match the signature shape");
  }
  const std::size_t per_path = batch.length() * batch.dim();
  std::vector<T> grad(batch.batch() * per_path);

  parallel_for(batch.batch(), resolve_threads(opts.threads), [&](std::size_t lo, std::size_t hi) {
    BackwardWorkspace<T> ws(shape);
    for (std::size_t b = lo; b < hi; ++b) {
      const IncrementStream<T> stream(batch, b, opts.transform);
      path_backward<T>(stream, opts.method, shape, cotangent.subspan(b * total, total), ws,
                       std::span<T>(grad).subspan(b * per_path, per_path));
    }
  });
  return grad;
}

template std::vector<float> signature_backward<float>(const PathBatch<float>&, const SigOptions&,
                                                      std::span<const float>);
template std::vector<double> signature_backward<double>(const PathBatch<double>&,
                                                        const SigOptions&,
                                                        std::span<const double>);

} // namespace sigcore
