#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sigcore/bench.hpp"
#include "sigcore/sigkernel_grad.hpp"
#include "timing.hpp"

// Wall-clock checks, single-threaded so they measure serial work.

using sigcore::BenchTask;
using Vec = std::vector<double>;

namespace {

// Ratio of bench minima for two shapes, measured interleaved.
double bench_ratio(BenchTask task, const sigcore::BenchShape& a, const sigcore::BenchShape& b) {
  return timing::ratio([&] { sigcore::bench(task, a, 1, 1); }, [&] { sigcore::bench(task, b, 1, 1); });
}

} // namespace

TEST(Scaling, SignatureLinearInBatch) {
  const double r = bench_ratio(BenchTask::signature_fwd, {32, 256, 4, 4, 0}, {64, 256, 4, 4, 0});
  EXPECT_GE(r, 1.5);
  EXPECT_LE(r, 3.0);
}

TEST(Scaling, KernelForwardPerDyadicOrder) {
  for (unsigned l = 0; l < 2; ++l) {
    const double r = bench_ratio(BenchTask::kernel_fwd, {2, 192, 4, 0, l}, {2, 192, 4, 0, l + 1});
    EXPECT_GE(r, 2.5) << "order " << l;
    EXPECT_LE(r, 6.0) << "order " << l;
  }
}

TEST(Scaling, KernelBackwardPerDyadicOrder) {
  // End to end, including coarse O(L1 L2 d) work that does not refine; it
  // weighs most at order 0, so start from order 1.
  for (unsigned l = 1; l < 3; ++l) {
    const double r = bench_ratio(BenchTask::kernel_bwd, {1, 128, 2, 0, l}, {1, 128, 2, 0, l + 1});
    EXPECT_GE(r, 2.5) << "order " << l;
    EXPECT_LE(r, 6.0) << "order " << l;
  }
}

TEST(Scaling, AdjointSweepIsOneGridTraversal) {
  oracle::Rng rng(81);
  const Vec x = oracle::random_path(256, 3, rng, 0.1), y = oracle::random_path(256, 3, rng, 0.1);
  const auto gram = sigcore::increment_gram<double>(x, y, 3);
  auto sweep = [&](unsigned l) {
    sigcore::KernelConfig cfg;
    cfg.dyadic_x = cfg.dyadic_y = l;
    cfg.threads = 1;
    cfg.store_grid = true;
    return std::function<void()>([gram, cfg, fwd = sigcore::solve_goursat(gram, cfg)] {
      sigcore::kernel_gram_backward(gram, cfg, fwd, 1.0);
    });
  };
  for (unsigned l = 0; l < 2; ++l) {
    const double r = timing::ratio(sweep(l), sweep(l + 1));
    EXPECT_GE(r, 3.0) << "order " << l;
    EXPECT_LE(r, 6.0) << "order " << l;
  }
}
