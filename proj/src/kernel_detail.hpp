#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>

#include "sigcore/sigkernel.hpp"

namespace sigcore::detail {

template <class T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// (L - 1) x dim matrix of consecutive differences of an (L x dim) path.
template <class T>
RowMatrix<T> increments(std::span<const T> path, std::size_t dim) {
  const auto length = static_cast<Eigen::Index>(path.size() / dim);
  const Eigen::Map<const RowMatrix<T>> points(path.data(), length,
                                              static_cast<Eigen::Index>(dim));
  return points.bottomRows(length - 1) - points.topRows(length - 1);
}

// Diagonal sweeps synchronize once per anti-diagonal, so a team only pays off
// when every worker gets a reasonable share of one diagonal.
inline constexpr std::size_t min_cells_per_worker = 16;

inline unsigned team_size(unsigned threads, std::size_t diagonal_length) {
  const std::size_t useful = std::max<std::size_t>(1, diagonal_length / min_cells_per_worker);
  return static_cast<unsigned>(std::min<std::size_t>(threads, useful));
}

inline std::size_t fine_cells(std::size_t coarse, unsigned dyadic) {
  if (dyadic >= 8 * sizeof(std::size_t) || coarse > (std::size_t(-1) >> dyadic)) {
    throw std::invalid_argument("solve_goursat: dyadic order too large for the path length");
  }
  return coarse << dyadic;
}

// Same as solve_goursat but with an explicit team size; used by the batch
// drivers, which already parallelize across pairs.
template <class T>
SolveResult<T> solve_goursat_team(const IncrementGram<T>& gram, const KernelConfig& cfg,
                                  unsigned threads);

} // namespace sigcore::detail
