#include "sigcore/signature.hpp"

#include <algorithm>
#include <stdexcept>

#include "sigcore/parallel.hpp"

namespace sigcore {

TensorShape signature_shape(std::size_t dim, const SigOptions& opts) {
  if (opts.depth == 0) throw std::invalid_argument("signature: depth must be at least 1");
  return TensorShape(transformed_dim(opts.transform, dim), opts.depth);
}

std::size_t horner_workspace_size(const TensorShape& shape) {
  return shape.level_size(shape.depth()) + shape.dim();
}

std::size_t direct_workspace_size(const TensorShape& shape) {
  return shape.total() + shape.dim();
}

namespace detail {

template <class T>
void horner_step(std::span<T> sig, std::span<const T> z, std::span<T> scratch,
                 const TensorShape& shape) {
  const std::size_t d = shape.dim();
  T* buf = scratch.data();

  for (std::size_t k = shape.depth(); k >= 2; --k) {
    const T inv_k = T(1) / static_cast<T>(k);
    for (std::size_t j = 0; j < d; ++j) buf[j] = z[j] * inv_k;
    std::size_t size = d;

    for (std::size_t i = 1; i + 2 <= k; ++i) {
      const T* ai = sig.data() + shape.offset(i);
      for (std::size_t j = 0; j < size; ++j) buf[j] += ai[j];

      // buf <- buf (x) z / (k - i), written back to front: entry idx expands
      // into [idx * d, idx * d + d), which never covers an unread entry.
      const T scale = T(1) / static_cast<T>(k - i);
      for (std::size_t idx = size; idx-- > 0;) {
        const T v = buf[idx] * scale;
        T* dst = buf + idx * d;
        for (std::size_t j = d; j-- > 0;) dst[j] = v * z[j];
      }
      size *= d;
    }

    const T* prev = sig.data() + shape.offset(k - 1);
    for (std::size_t j = 0; j < size; ++j) buf[j] += prev[j];

    T* ak = sig.data() + shape.offset(k);
    for (std::size_t idx = 0; idx < size; ++idx) {
      const T v = buf[idx];
      T* dst = ak + idx * d;
      for (std::size_t j = 0; j < d; ++j) dst[j] += v * z[j];
    }
  }

  for (std::size_t j = 0; j < d; ++j) sig[j] += z[j];
}

template <class T>
void direct_step(std::span<T> sig, std::span<const T> z, std::span<T> scratch,
                 const TensorShape& shape) {
  const std::span<T> e = scratch.first(shape.total());
  tensor_exp<T>(z, shape, e);
  chen_inplace<T>(sig, e, shape);
}

template <class T>
void stream_signature(const IncrementStream<T>& stream, SigMethod method, const TensorShape& shape,
                      std::span<T> workspace, std::span<T> out) {
  const std::size_t d = shape.dim();
  const std::span<T> z = workspace.first(d);
  const std::span<T> scratch = workspace.subspan(d);

  std::fill(out.begin(), out.end(), T(0));
  const std::size_t steps = stream.steps();
  if (steps == 0) return;

  stream.fill(0, z);
  tensor_exp<T>(z, shape, out);
  for (std::size_t step = 1; step < steps; ++step) {
    stream.fill(step, z);
    if (is_zero<T>(z)) continue;
    if (method == SigMethod::horner) {
      horner_step<T>(out, z, scratch, shape);
    } else {
      direct_step<T>(out, z, scratch, shape);
    }
  }
}

} // namespace detail

template <class T>
void signature_into(const PathBatch<T>& batch, const SigOptions& opts, std::span<T> out) {
  validate(batch, 2, "signature");
  require_finite(batch.data, "signature");
  require_finite(batch.times, "signature");
  const TensorShape shape = signature_shape(batch.dim(), opts);
  const std::size_t total = shape.total();
  if (out.size() != batch.batch() * total) {
    throw std::invalid_argument("signature: output buffer has the wrong size");
  }
  const std::size_t ws_size = opts.method == SigMethod::horner ? horner_workspace_size(shape)
                                                               : direct_workspace_size(shape);

  parallel_for(batch.batch(), resolve_threads(opts.threads), [&](std::size_t lo, std::size_t hi) {
    std::vector<T> workspace(ws_size);
    for (std::size_t b = lo; b < hi; ++b) {
      const IncrementStream<T> stream(batch, b, opts.transform);
      detail::stream_signature<T>(stream, opts.method, shape, workspace,
                                  out.subspan(b * total, total));
    }
  });
}

template <class T>
std::vector<T> signature(const PathBatch<T>& batch, const SigOptions& opts) {
  const TensorShape shape = signature_shape(batch.dim(), opts);
  std::vector<T> out(batch.batch() * shape.total());
  signature_into(batch, opts, std::span<T>(out));
  return out;
}

#define SIGCORE_INSTANTIATE(T)                                                                   \
  template std::vector<T> signature<T>(const PathBatch<T>&, const SigOptions&);                  \
  template void signature_into<T>(const PathBatch<T>&, const SigOptions&, std::span<T>);         \
  template void detail::horner_step<T>(std::span<T>, std::span<const T>, std::span<T>,           \
                                       const TensorShape&);                                      \
  template void detail::direct_step<T>(std::span<T>, std::span<const T>, std::span<T>,           \
                                       const TensorShape&);                                      \
  template void detail::stream_signature<T>(const IncrementStream<T>&, SigMethod,                \
                                            const TensorShape&, std::span<T>, std::span<T>);

SIGCORE_INSTANTIATE(float)
SIGCORE_INSTANTIATE(double)

#undef SIGCORE_INSTANTIATE

} // namespace sigcore
