#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sigcore/path.hpp"
#include "sigcore/tensor.hpp"
#include "sigcore/transforms.hpp"

namespace sigcore {

enum class SigMethod { direct, horner };

struct SigOptions {
  std::size_t depth = 1;
  SigMethod method = SigMethod::horner;
  Transform transform = Transform::none;
  unsigned threads = 0; // 0: see resolve_threads
};

// Shape of each output signature: the effective (post-transform) dimension
// truncated at opts.depth.
TensorShape signature_shape(std::size_t dim, const SigOptions& opts);

// Truncated signatures of every path in the batch, one flat B x total buffer.
// The batch is split across workers; each path is computed serially, so the
// result does not depend on the thread count.
template <class T>
std::vector<T> signature(const PathBatch<T>& batch, const SigOptions& opts);

template <class T>
void signature_into(const PathBatch<T>& batch, const SigOptions& opts, std::span<T> out);

// Scalars in the single per-worker scratch block: a d^N block reused by every
// Horner factor plus room for the current increment.
std::size_t horner_workspace_size(const TensorShape& shape);
std::size_t direct_workspace_size(const TensorShape& shape);

namespace detail {

// sig <- sig (x) exp(z) using the factored (Horner) update. `scratch` holds at
// least d^N scalars and is overwritten.
template <class T>
void horner_step(std::span<T> sig, std::span<const T> z, std::span<T> scratch,
                 const TensorShape& shape);

// sig <- sig (x) exp(z) by materializing exp(z) into `scratch` (shape.total()
// scalars) and multiplying it in level by level.
template <class T>
void direct_step(std::span<T> sig, std::span<const T> z, std::span<T> scratch,
                 const TensorShape& shape);

// Signature of one increment stream into `out`. `workspace` must hold
// horner_workspace_size / direct_workspace_size scalars for the method.
template <class T>
void stream_signature(const IncrementStream<T>& stream, SigMethod method, const TensorShape& shape,
                      std::span<T> workspace, std::span<T> out);

template <class T>
bool is_zero(std::span<const T> z) {
  for (const T v : z) {
    if (v != T(0)) return false;
  }
  return true;
}

} // namespace detail

} // namespace sigcore
