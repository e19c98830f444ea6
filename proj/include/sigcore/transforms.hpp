#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "sigcore/path.hpp"

namespace sigcore {

enum class Transform {
  none,
  time_augment, // x_i -> (x_i, t_i)
  lead_lag,     // Z_2k = (X_k, X_k), Z_2k+1 = (X_k+1, X_k), lead first
};

inline std::size_t transformed_dim(Transform kind, std::size_t dim) {
  switch (kind) {
  case Transform::time_augment: return dim + 1;
  case Transform::lead_lag: return 2 * dim;
  default: return dim;
  }
}

inline std::size_t transformed_length(Transform kind, std::size_t length) {
  return kind == Transform::lead_lag && length > 0 ? 2 * length - 1 : length;
}

inline BatchShape transformed_shape(Transform kind, const BatchShape& shape) {
  return {shape.batch, transformed_length(kind, shape.length), transformed_dim(kind, shape.dim)};
}

// Materializes the transformed batch.
template <class T>
PathArray<T> transform(const PathBatch<T>& batch, Transform kind);

// Adjoint of `transform` as a linear map on the path coordinates: maps a
// gradient over the transformed batch back onto a batch of shape `original`.
// The time column of a time-augmented path carries no gradient.
template <class T>
std::vector<T> transform_adjoint(std::span<const T> grad_out, const BatchShape& original,
                                 Transform kind);

// Increments of one (possibly transformed) path, generated on demand from the
// original points so the transformed path is never stored.
template <class T>
class IncrementStream {
public:
  IncrementStream(const PathBatch<T>& batch, std::size_t index, Transform kind)
      : batch_(batch), path_(batch.path(index)), kind_(kind),
        dim_(transformed_dim(kind, batch.dim())) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t source_length() const noexcept { return batch_.length(); }
  std::size_t source_dim() const noexcept { return batch_.dim(); }

  std::size_t steps() const noexcept {
    const std::size_t segments = batch_.length() - 1;
    return kind_ == Transform::lead_lag ? 2 * segments : segments;
  }

  void fill(std::size_t step, std::span<T> z) const {
    const std::size_t d = batch_.dim();
    switch (kind_) {
    case Transform::none:
      segment(step, z.first(d));
      break;
    case Transform::time_augment:
      segment(step, z.first(d));
      z[d] = batch_.time(step + 1) - batch_.time(step);
      break;
    case Transform::lead_lag: {
      // step 2k moves the lead half, step 2k+1 the lag half
      const std::size_t k = step / 2;
      const bool lead = step % 2 == 0;
      segment(k, z.subspan(lead ? 0 : d, d));
      std::fill_n(z.begin() + (lead ? d : 0), d, T(0));
      break;
    }
    }
  }

  // Adds the contribution of d F / d z_step to the gradient of the source
  // path's points (L x d). Zero components of a fused increment carry no
  // dependence on the input and are skipped.
  void scatter_adjoint(std::size_t step, std::span<const T> grad_z, std::span<T> grad_points) const {
    const std::size_t d = batch_.dim();
    std::size_t k = step;
    std::span<const T> g = grad_z.first(d);
    if (kind_ == Transform::lead_lag) {
      k = step / 2;
      g = grad_z.subspan(step % 2 == 0 ? 0 : d, d);
    }
    T* next = grad_points.data() + (k + 1) * d;
    T* prev = grad_points.data() + k * d;
    for (std::size_t c = 0; c < d; ++c) {
      next[c] += g[c];
      prev[c] -= g[c];
    }
  }

private:
  void segment(std::size_t k, std::span<T> out) const {
    const std::size_t d = batch_.dim();
    const T* a = path_.data() + k * d;
    const T* b = a + d;
    for (std::size_t c = 0; c < d; ++c) out[c] = b[c] - a[c];
  }

  PathBatch<T> batch_;
  std::span<const T> path_;
  Transform kind_;
  std::size_t dim_;
};

template <class T>
IncrementStream<T> fused_increments(const PathBatch<T>& batch, std::size_t index, Transform kind) {
  if (batch.length() < 1) throw std::invalid_argument("fused_increments: empty path");
  return IncrementStream<T>(batch, index, kind);
}

} // namespace sigcore
