#pragma once

#include <span>
#include <vector>

#include "sigcore/signature.hpp"

namespace sigcore {

// Reverse-mode gradient of the truncated signature with respect to the input
// points. `cotangent` holds dF/dS for every path (B x total, laid out like
// the output of `signature` with the same options); the result is dF/dx as a
// B x L x d buffer over the untransformed points.
//
// Prefix signatures are not stored. The forward signature is recomputed and
// then peeled off one segment at a time from the end, using
// S(x_1..l) = S(x_1..l+1) (x) exp(-z_l), so memory stays O(d^N) per worker.
// Rounding error of the peeling grows with the path length.
template <class T>
std::vector<T> signature_backward(const PathBatch<T>& batch, const SigOptions& opts,
                                  std::span<const T> cotangent);

} // namespace sigcore
