#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sigcore {

struct BatchShape {
  std::size_t batch = 0;
  std::size_t length = 0;
  std::size_t dim = 0;

  std::size_t points() const noexcept { return batch * length; }
  std::size_t size() const noexcept { return batch * length * dim; }
  friend bool operator==(const BatchShape&, const BatchShape&) = default;
};

// Borrowed view of B paths with L points of dimension d, stored row-major as
// B x L x d. `times` is an optional time grid of L strictly increasing values
// shared by every path; when empty the grid is uniform on [0, 1].
template <class T>
struct PathBatch {
  std::span<const T> data;
  BatchShape shape;
  std::span<const T> times = {};

  std::size_t batch() const noexcept { return shape.batch; }
  std::size_t length() const noexcept { return shape.length; }
  std::size_t dim() const noexcept { return shape.dim; }

  std::span<const T> path(std::size_t b) const {
    return data.subspan(b * shape.length * shape.dim, shape.length * shape.dim);
  }

  T time(std::size_t i) const {
    if (!times.empty()) return times[i];
    if (shape.length < 2) return T(0);
    return static_cast<T>(i) / static_cast<T>(shape.length - 1);
  }
};

// Owning counterpart of PathBatch, used for transform outputs and gradients.
template <class T>
struct PathArray {
  std::vector<T> data;
  BatchShape shape;

  PathBatch<T> view() const { return {data, shape}; }
};

template <class T>
PathBatch<T> make_batch(std::span<const T> data, std::size_t batch, std::size_t length,
                        std::size_t dim, std::span<const T> times = {}) {
  return {data, {batch, length, dim}, times};
}

// Throws std::invalid_argument unless the view is consistent: positive batch
// and dimension, at least `min_length` points, matching buffer size, and a
// strictly increasing time grid when one is given.
template <class T>
void validate(const PathBatch<T>& batch, std::size_t min_length, const char* who);

// Throws std::invalid_argument if any coordinate is NaN or infinite.
template <class T>
void require_finite(std::span<const T> values, const char* who);

} // namespace sigcore
