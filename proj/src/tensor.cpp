#include "sigcore/tensor.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace sigcore {

namespace {

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(want) +
                                " entries, got " + std::to_string(got));
  }
}

// dst[I * m + J] += lhs[I] * rhs[J] for |lhs| = n, |rhs| = m.
template <class T>
inline void outer_acc(T* dst, const T* lhs, std::size_t n, const T* rhs, std::size_t m) {
  for (std::size_t i = 0; i < n; ++i) {
    const T li = lhs[i];
    T* row = dst + i * m;
    for (std::size_t j = 0; j < m; ++j) {
      row[j] += li * rhs[j];
    }
  }
}

} // namespace

TensorShape::TensorShape(std::size_t dim, std::size_t depth) : dim_(dim), depth_(depth) {
  if (dim == 0 || depth == 0) {
    throw std::invalid_argument("tensor_shape: dimension and depth must be positive");
  }
  offsets_.reserve(depth + 1);
  offsets_.push_back(0);
  std::size_t level = 1;
  constexpr auto max = std::numeric_limits<std::size_t>::max();
  for (std::size_t k = 1; k <= depth; ++k) {
    if (level > max / dim) {
      throw std::invalid_argument("tensor_shape: d^N overflows");
    }
    level *= dim;
    if (offsets_.back() > max - level) {
      throw std::invalid_argument("tensor_shape: total size overflows");
    }
    offsets_.push_back(offsets_.back() + level);
  }
}

TensorShape tensor_shape(std::size_t dim, std::size_t depth) { return TensorShape(dim, depth); }

template <class T>
void tensor_exp(std::span<const T> z, const TensorShape& shape, std::span<T> out) {
  require_size(z.size(), shape.dim(), "tensor_exp: increment");
  require_size(out.size(), shape.total(), "tensor_exp: output");
  const std::size_t d = shape.dim();
  std::copy(z.begin(), z.end(), out.begin());
  for (std::size_t k = 2; k <= shape.depth(); ++k) {
    const T inv = T(1) / static_cast<T>(k);
    const T* prev = out.data() + shape.offset(k - 1);
    T* cur = out.data() + shape.offset(k);
    const std::size_t n = shape.level_size(k - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const T scaled = prev[i] * inv;
      for (std::size_t j = 0; j < d; ++j) {
        cur[i * d + j] = scaled * z[j];
      }
    }
  }
}

template <class T>
std::vector<T> tensor_exp(std::span<const T> z, const TensorShape& shape) {
  std::vector<T> out(shape.total());
  tensor_exp<T>(z, shape, out);
  return out;
}

template <class T>
void mul_acc(std::span<T> c, std::span<const T> a, std::span<const T> b, const TensorShape& shape,
             ChenTerms terms) {
  require_size(c.size(), shape.total(), "mul_acc: destination");
  require_size(a.size(), shape.total(), "mul_acc: left operand");
  require_size(b.size(), shape.total(), "mul_acc: right operand");
  for (std::size_t k = shape.depth(); k >= 1; --k) {
    T* ck = c.data() + shape.offset(k);
    for (std::size_t i = k - 1; i >= 1; --i) {
      outer_acc(ck, a.data() + shape.offset(i), shape.level_size(i),
                b.data() + shape.offset(k - i), shape.level_size(k - i));
    }
    if (terms == ChenTerms::cross_linear) {
      const T* ak = a.data() + shape.offset(k);
      const T* bk = b.data() + shape.offset(k);
      for (std::size_t j = 0; j < shape.level_size(k); ++j) {
        ck[j] += ak[j] + bk[j];
      }
    }
  }
}

template <class T>
void chen_inplace(std::span<T> a, std::span<const T> b, const TensorShape& shape) {
  require_size(a.size(), shape.total(), "chen_inplace: left operand");
  require_size(b.size(), shape.total(), "chen_inplace: right operand");
  for (std::size_t k = shape.depth(); k >= 1; --k) {
    T* ak = a.data() + shape.offset(k);
    for (std::size_t i = k - 1; i >= 1; --i) {
      outer_acc(ak, a.data() + shape.offset(i), shape.level_size(i),
                b.data() + shape.offset(k - i), shape.level_size(k - i));
    }
    const T* bk = b.data() + shape.offset(k);
    for (std::size_t j = 0; j < shape.level_size(k); ++j) {
      ak[j] += bk[j];
    }
  }
}

template <class T>
T dot(std::span<const T> a, std::span<const T> b, const TensorShape& shape) {
  require_size(a.size(), shape.total(), "dot: left operand");
  require_size(b.size(), shape.total(), "dot: right operand");
  T acc = T(1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += a[i] * b[i];
  }
  return acc;
}

#define SIGCORE_INSTANTIATE(T)                                                                   \
  template void tensor_exp<T>(std::span<const T>, const TensorShape&, std::span<T>);             \
  template std::vector<T> tensor_exp<T>(std::span<const T>, const TensorShape&);                 \
  template void mul_acc<T>(std::span<T>, std::span<const T>, std::span<const T>,                 \
                           const TensorShape&, ChenTerms);                                       \
  template void chen_inplace<T>(std::span<T>, std::span<const T>, const TensorShape&);           \
  template T dot<T>(std::span<const T>, std::span<const T>, const TensorShape&);

SIGCORE_INSTANTIATE(float)
SIGCORE_INSTANTIATE(double)

#undef SIGCORE_INSTANTIATE

} // namespace sigcore
