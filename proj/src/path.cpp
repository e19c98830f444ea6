#include "sigcore/path.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sigcore {

template <class T>
void validate(const PathBatch<T>& batch, std::size_t min_length, const char* who) {
  const std::string name(who);
  if (batch.batch() == 0) throw std::invalid_argument(name + ": empty batch");
  if (batch.dim() == 0) throw std::invalid_argument(name + ": path dimension must be positive");
  if (batch.length() < min_length) {
    throw std::invalid_argument(name + ": paths need at least " + std::to_string(min_length) +
                                " points, got " + std::to_string(batch.length()));
  }
  if (batch.data.size() != batch.shape.size()) {
    throw std::invalid_argument(name + ": buffer holds " + std::to_string(batch.data.size()) +
                                " values, shape needs " + std::to_string(batch.shape.size()));
  }
  if (!batch.times.empty()) {
    if (batch.times.size() != batch.length()) {
      throw std::invalid_argument(name + ": time grid length does not match path length");
    }
    for (std::size_t i = 1; i < batch.times.size(); ++i) {
      if (!(batch.times[i] > batch.times[i - 1])) {
        throw std::invalid_argument(name + ": time grid must be strictly increasing");
      }
    }
  }
}

template <class T>
void require_finite(std::span<const T> values, const char* who) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw std::invalid_argument(std::string(who) + ": non-finite value at flat index " +
                                  std::to_string(i));
    }
  }
}

template void validate<float>(const PathBatch<float>&, std::size_t, const char*);
template void validate<double>(const PathBatch<double>&, std::size_t, const char*);
template void require_finite<float>(std::span<const float>, const char*);
template void require_finite<double>(std::span<const double>, const char*);

} // namespace sigcore
