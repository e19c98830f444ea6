#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sigcore {

// Layout of a truncated tensor-algebra element of R^d up to level N.
//
// Levels 1..N are stored back to back in one flat buffer; level 0 is the
// implicit scalar 1 and is never stored. Within level k the multi-index
// (i1, ..., ik) lives at offset(k) + sum_m i_m * d^(k-m), i.e. row-major,
// so the last index varies fastest.
class TensorShape {
public:
  TensorShape(std::size_t dim, std::size_t depth);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t depth() const noexcept { return depth_; }

  // offsets()[k] is the start of level k+1; offsets()[depth] == total().
  std::span<const std::size_t> offsets() const noexcept { return offsets_; }

  std::size_t offset(std::size_t level) const noexcept { return offsets_[level - 1]; }
  std::size_t level_size(std::size_t level) const noexcept {
    return offsets_[level] - offsets_[level - 1];
  }
  std::size_t total() const noexcept { return offsets_.back(); }

  friend bool operator==(const TensorShape&, const TensorShape&) = default;

private:
  std::size_t dim_;
  std::size_t depth_;
  std::vector<std::size_t> offsets_;
};

TensorShape tensor_shape(std::size_t dim, std::size_t depth);

// Which terms mul_acc adds into the destination.
enum class ChenTerms {
  cross,        // sum_{i+j=k, i,j>=1} A_i (x) B_j
  cross_linear, // cross terms plus A_k + B_k
};

// Writes exp(z) = sum_k z^(x)k / k! (levels 1..N) into `out`.
template <class T>
void tensor_exp(std::span<const T> z, const TensorShape& shape, std::span<T> out);

template <class T>
std::vector<T> tensor_exp(std::span<const T> z, const TensorShape& shape);

// c += A (x) B restricted to the requested terms, truncated at the shape's
// depth. `c` must not alias `a` or `b`; use chen_inplace for that.
template <class T>
void mul_acc(std::span<T> c, std::span<const T> a, std::span<const T> b,
             const TensorShape& shape, ChenTerms terms = ChenTerms::cross_linear);

// a <- a (x) b. Levels are rewritten from N down to 1 so each level only
// reads lower levels of `a` that have not been overwritten yet.
template <class T>
void chen_inplace(std::span<T> a, std::span<const T> b, const TensorShape& shape);

// 1 + sum_k <A_k, B_k>
template <class T>
T dot(std::span<const T> a, std::span<const T> b, const TensorShape& shape);

} // namespace sigcore
