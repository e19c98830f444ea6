#include "sigcore/transforms.hpp"

#include <algorithm>

namespace sigcore {

template <class T>
PathArray<T> transform(const PathBatch<T>& batch, Transform kind) {
  validate(batch, 1, "transform");
  const std::size_t d = batch.dim();
  const std::size_t L = batch.length();
  PathArray<T> out;
  out.shape = transformed_shape(kind, batch.shape);
  out.data.resize(out.shape.size());
  const std::size_t out_d = out.shape.dim;

  for (std::size_t b = 0; b < batch.batch(); ++b) {
    const T* src = batch.path(b).data();
    T* dst = out.data.data() + b * out.shape.length * out_d;
    switch (kind) {
    case Transform::none:
      std::copy_n(src, L * d, dst);
      break;
    case Transform::time_augment:
      for (std::size_t i = 0; i < L; ++i) {
        std::copy_n(src + i * d, d, dst + i * out_d);
        dst[i * out_d + d] = batch.time(i);
      }
      break;
    case Transform::lead_lag:
      for (std::size_t i = 0; i < out.shape.length; ++i) {
        const std::size_t lead = (i + 1) / 2;
        const std::size_t lag = i / 2;
        std::copy_n(src + lead * d, d, dst + i * out_d);
        std::copy_n(src + lag * d, d, dst + i * out_d + d);
      }
      break;
    }
  }
  return out;
}

template <class T>
std::vector<T> transform_adjoint(std::span<const T> grad_out, const BatchShape& original,
                                 Transform kind) {
  if (original.length == 0 || original.dim == 0) {
    throw std::invalid_argument("transform_adjoint: empty path");
  }
  const BatchShape out_shape = transformed_shape(kind, original);
  if (grad_out.size() != out_shape.size()) {
    throw std::invalid_argument("transform_adjoint: gradient does not match transformed shape");
  }
  const std::size_t d = original.dim;
  const std::size_t out_d = out_shape.dim;
  std::vector<T> grad(original.size(), T(0));

  for (std::size_t b = 0; b < original.batch; ++b) {
    const T* src = grad_out.data() + b * out_shape.length * out_d;
    T* dst = grad.data() + b * original.length * d;
    switch (kind) {
    case Transform::none:
      std::copy_n(src, original.length * d, dst);
      break;
    case Transform::time_augment:
      for (std::size_t i = 0; i < original.length; ++i) {
        std::copy_n(src + i * out_d, d, dst + i * d);
      }
      break;
    case Transform::lead_lag:
      for (std::size_t i = 0; i < out_shape.length; ++i) {
        T* lead = dst + ((i + 1) / 2) * d;
        T* lag = dst + (i / 2) * d;
        for (std::size_t c = 0; c < d; ++c) {
          lead[c] += src[i * out_d + c];
          lag[c] += src[i * out_d + d + c];
        }
      }
      break;
    }
  }
  return grad;
}

template PathArray<float> transform<float>(const PathBatch<float>&, Transform);
template PathArray<double> transform<double>(const PathBatch<double>&, Transform);
template std::vector<float> transform_adjoint<float>(std::span<const float>, const BatchShape&,
                                                     Transform);
template std::vector<double> transform_adjoint<double>(std::span<const double>,
                                                       const BatchShape&, Transform);

} // namespace sigcore
