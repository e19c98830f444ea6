#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "alloc_counter.hpp"
#include "oracles.hpp"
#include "sigcore/sigkernel.hpp"
#include "sigcore/signature.hpp"

using sigcore::KernelConfig;
using Vec = std::vector<double>;

namespace {

KernelConfig config(unsigned lx = 0, unsigned ly = 0, std::size_t width = 32, unsigned threads = 1,
                    bool store = false) {
  KernelConfig c;
  c.dyadic_x = lx;
  c.dyadic_y = ly;
  c.strip_width = width;
  c.threads = threads;
  c.store_grid = store;
  return c;
}

double solve(const Vec& x, const Vec& y, std::size_t d, const KernelConfig& cfg) {
  return sigcore::solve_goursat(sigcore::increment_gram<double>(x, y, d), cfg).value;
}

double signature_oracle(const Vec& x, const Vec& y, std::size_t d, std::size_t depth = 12) {
  sigcore::SigOptions o;
  o.depth = depth;
  o.threads = 1;
  const auto sx = sigcore::signature<double>(sigcore::make_batch<double>(x, 1, x.size() / d, d), o);
  const auto sy = sigcore::signature<double>(sigcore::make_batch<double>(y, 1, y.size() / d, d), o);
  return sigcore::dot<double>(sx, sy, sigcore::tensor_shape(d, depth));
}

// Inserts 2^order - 1 equally spaced points inside every segment.
Vec refine(const Vec& x, std::size_t d, unsigned order) {
  const std::size_t pieces = std::size_t{1} << order;
  const std::size_t l = x.size() / d;
  Vec out;
  for (std::size_t i = 0; i + 1 < l; ++i) {
    for (std::size_t k = 0; k < pieces; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(pieces);
      for (std::size_t c = 0; c < d; ++c) out.push_back(x[i * d + c] + t * (x[(i + 1) * d + c] - x[i * d + c]));
    }
  }
  out.insert(out.end(), x.end() - static_cast<std::ptrdiff_t>(d), x.end());
  return out;
}

} // namespace

TEST(IncrementGram, Examples) {
  const auto g = sigcore::increment_gram<double>(Vec{0, 1}, Vec{0, 1}, 1);
  EXPECT_EQ(g.rows, 1u);
  EXPECT_EQ(g.values, (Vec{1}));

  const auto col = sigcore::increment_gram<double>(Vec{0, 0, 1, 0, 1, 1}, Vec{0, 0, 1, 1}, 2);
  EXPECT_EQ(col.rows, 2u);
  EXPECT_EQ(col.cols, 1u);
  EXPECT_EQ(col.values, (Vec{1, 1}));

  const auto ortho = sigcore::increment_gram<double>(Vec{0, 0, 2, 0}, Vec{0, 0, 0, 3}, 2);
  EXPECT_EQ(ortho.values, (Vec{0}));
}

TEST(IncrementGram, MatchesDotProducts) {
  oracle::Rng rng(41);
  const std::size_t d = 3;
  const Vec x = oracle::random_path(5, d, rng), y = oracle::random_path(7, d, rng);
  const auto g = sigcore::increment_gram<double>(x, y, d);
  ASSERT_EQ(g.rows, 4u);
  ASSERT_EQ(g.cols, 6u);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      double s = 0;
      for (std::size_t c = 0; c < d; ++c) {
        s += (x[(i + 1) * d + c] - x[i * d + c]) * (y[(j + 1) * d + c] - y[j * d + c]);
      }
      EXPECT_NEAR(g(i, j), s, 1e-15);
    }
  }
}

TEST(IncrementGram, Errors) {
  EXPECT_THROW(sigcore::increment_gram<double>(Vec{0, 1, 2}, Vec{0, 1}, 2), std::invalid_argument);
  EXPECT_THROW(sigcore::increment_gram<double>(Vec{0, 1}, Vec{0}, 1), std::invalid_argument);
}

TEST(SolveGoursat, ZeroGramGivesOne) {
  sigcore::IncrementGram<double> g{3, 4, Vec(12, 0.0)};
  for (bool store : {false, true}) {
    EXPECT_EQ(sigcore::solve_goursat(g, config(2, 1, 32, 1, store)).value, 1.0);
  }
}

TEST(SolveGoursat, OneCell) {
  sigcore::IncrementGram<double> g{1, 1, Vec{1.0}};
  EXPECT_EQ(sigcore::solve_goursat(g, config()).value, 2.25);
  EXPECT_EQ(sigcore::solve_goursat(g, config(0, 0, 32, 1, true)).value, 2.25);
}

TEST(SolveGoursat, StoredGrid) {
  oracle::Rng rng(42);
  const Vec x = oracle::random_path(4, 2, rng, 0.4), y = oracle::random_path(6, 2, rng, 0.4);
  const auto g = sigcore::increment_gram<double>(x, y, 2);
  const auto r = sigcore::solve_goursat(g, config(1, 2, 32, 1, true));
  ASSERT_TRUE(r.has_grid());
  EXPECT_EQ(r.rows, 3u * 2 + 1);
  EXPECT_EQ(r.cols, 5u * 4 + 1);
  for (std::size_t j = 0; j < r.cols; ++j) EXPECT_EQ(r.at(0, j), 1.0);
  for (std::size_t i = 0; i < r.rows; ++i) EXPECT_EQ(r.at(i, 0), 1.0);
  EXPECT_EQ(r.value, r.at(r.rows - 1, r.cols - 1));
  EXPECT_FALSE(sigcore::solve_goursat(g, config(1, 2)).has_grid());
}

TEST(SolveGoursat, MatchesSignatureInnerProduct) {
  oracle::Rng rng(43);
  for (int trial = 0; trial < 5; ++trial) {
    const Vec x = oracle::path_with_variation(5, 2, rng.uniform(0.3, 1.0), rng);
    const Vec y = oracle::path_with_variation(5, 2, rng.uniform(0.3, 1.0), rng);
    EXPECT_LT(oracle::rel_error(solve(x, y, 2, config(3, 3)), signature_oracle(x, y, 2)), 1e-3);
  }
}

TEST(SolveGoursat, DyadicOrderMatchesExplicitRefinement) {
  oracle::Rng rng(44);
  const std::size_t d = 2;
  const Vec x = oracle::random_path(4, d, rng, 0.5), y = oracle::random_path(5, d, rng, 0.5);
  for (unsigned lx : {0u, 1u, 2u}) {
    for (unsigned ly : {0u, 1u, 3u}) {
      const double refined = solve(refine(x, d, lx), refine(y, d, ly), d, config());
      EXPECT_NEAR(solve(x, y, d, config(lx, ly)), refined, 1e-13 * std::abs(refined));
    }
  }
}

TEST(SolveGoursat, AsymptoticallySecondOrder) {
  // Once the grid resolves the path the error falls by about 4 per
  // refinement. At coarse orders it can change sign, so start at 4.
  oracle::Rng rng(45);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec x = oracle::path_with_variation(4, 2, 1.0, rng);
    const Vec y = oracle::path_with_variation(4, 2, 1.0, rng);
    const double exact = signature_oracle(x, y, 2, 14);
    double previous = std::abs(solve(x, y, 2, config(4, 4)) - exact);
    for (unsigned l = 5; l <= 7; ++l) {
      const double err = std::abs(solve(x, y, 2, config(l, l)) - exact);
      EXPECT_GE(previous / err, 3.0) << "trial " << trial << " order " << l;
      previous = err;
    }
  }
}

TEST(SolveGoursat, StripWidthAndThreadsAreBitIdentical) {
  oracle::Rng rng(46);
  for (int trial = 0; trial < 4; ++trial) {
    const Vec x = oracle::random_path(3 + rng.index(30), 3, rng, 0.2);
    const Vec y = oracle::random_path(3 + rng.index(30), 3, rng, 0.2);
    const auto g = sigcore::increment_gram<double>(x, y, 3);
    const unsigned lx = static_cast<unsigned>(rng.index(3)), ly = static_cast<unsigned>(rng.index(3));
    const double reference = sigcore::solve_goursat(g, config(lx, ly, 32, 1, true)).value;
    for (std::size_t w : {1, 7, 32, 257}) {
      for (unsigned t : {1u, 4u, 8u}) {
        EXPECT_EQ(sigcore::solve_goursat(g, config(lx, ly, w, t)).value, reference)
            << "width " << w << " threads " << t;
      }
    }
  }
}

TEST(SolveGoursat, ConstantPathGivesExactlyOne) {
  oracle::Rng rng(47);
  const Vec x = oracle::random_path(9, 2, rng);
  const Vec c{0.3, -0.2, 0.3, -0.2, 0.3, -0.2};
  EXPECT_EQ(solve(x, c, 2, config(2, 1)), 1.0);
  EXPECT_EQ(solve(c, x, 2, config(0, 3)), 1.0);
}

TEST(SolveGoursat, Errors) {
  sigcore::IncrementGram<double> g{1, 1, Vec{1.0}};
  EXPECT_THROW(sigcore::solve_goursat(g, config(0, 0, 0)), std::invalid_argument);
  EXPECT_THROW(sigcore::solve_goursat(g, config(70, 0)), std::invalid_argument);
  sigcore::IncrementGram<double> bad{2, 2, Vec{1.0}};
  EXPECT_THROW(sigcore::solve_goursat(bad, config()), std::invalid_argument);
}

TEST(SolveGoursat, WorkingMemoryIndependentOfLongAxis) {
  oracle::Rng rng(48);
  const Vec y = oracle::random_path(6, 2, rng, 0.2);
  std::vector<std::size_t> totals;
  for (std::size_t l : {40, 400, 4000}) {
    const Vec x = oracle::random_path(l, 2, rng, 0.01);
    for (const bool x_first : {true, false}) {
      const auto g = x_first ? sigcore::increment_gram<double>(x, y, 2) : sigcore::increment_gram<double>(y, x, 2);
      alloc_counter::Recording rec;
      sigcore::solve_goursat(g, config(1, 1, 16));
      std::size_t total = 0;
      for (const auto s : rec.finish()) total += s;
      totals.push_back(total);
    }
  }
  for (const auto t : totals) EXPECT_EQ(t, totals.front());
  // One handoff row (short axis + 1) plus three diagonals of the strip width.
  EXPECT_EQ(totals.front(), (5 * 2 + 1 + 3 * 16) * sizeof(double));
}

TEST(KernelBatch, ConstantPaths) {
  const Vec c(3 * 4 * 2, 0.7);
  const auto batch = sigcore::make_batch<double>(c, 3, 4, 2);
  EXPECT_EQ(sigcore::kernel_batch(batch, batch, config()), Vec(3, 1.0));
  const auto single = sigcore::make_batch<double>(std::span(c).first(8), 1, 4, 2);
  EXPECT_EQ(sigcore::kernel_gram(single, single, config()), Vec{1.0});
}

TEST(KernelBatch, MatchesPerPairSolves) {
  oracle::Rng rng(49);
  const std::size_t b = 5, l1 = 7, l2 = 9, d = 2;
  const Vec x = oracle::random_path(b * l1, d, rng, 0.3), y = oracle::random_path(b * l2, d, rng, 0.3);
  const auto bx = sigcore::make_batch<double>(x, b, l1, d);
  const auto by = sigcore::make_batch<double>(y, b, l2, d);
  for (unsigned t : {1u, 2u, 8u}) {
    const Vec k = sigcore::kernel_batch(bx, by, config(1, 2, 32, t));
    for (std::size_t i = 0; i < b; ++i) {
      const Vec xi(bx.path(i).begin(), bx.path(i).end()), yi(by.path(i).begin(), by.path(i).end());
      EXPECT_EQ(k[i], solve(xi, yi, d, config(1, 2)));
    }
  }
  EXPECT_THROW(sigcore::kernel_batch(bx, sigcore::make_batch<double>(std::span(y).first(4 * l2 * d), 4, l2, d), config()),
               std::invalid_argument);
}

TEST(KernelGram, EntriesAndSymmetry) {
  oracle::Rng rng(50);
  const std::size_t b1 = 4, b2 = 3, l = 6, d = 2;
  const Vec x = oracle::random_path(b1 * l, d, rng, 0.3), y = oracle::random_path(b2 * l, d, rng, 0.3);
  const auto bx = sigcore::make_batch<double>(x, b1, l, d);
  const auto by = sigcore::make_batch<double>(y, b2, l, d);
  const Vec g = sigcore::kernel_gram(bx, by, config(1, 1, 32, 4));
  ASSERT_EQ(g.size(), b1 * b2);
  for (std::size_t i = 0; i < b1; ++i) {
    for (std::size_t j = 0; j < b2; ++j) {
      const Vec xi(bx.path(i).begin(), bx.path(i).end()), yj(by.path(j).begin(), by.path(j).end());
      EXPECT_EQ(g[i * b2 + j], solve(xi, yj, d, config(1, 1)));
    }
  }
  const Vec s = sigcore::kernel_gram(bx, config(1, 1));
  for (std::size_t i = 0; i < b1; ++i) {
    for (std::size_t j = 0; j < b1; ++j) EXPECT_EQ(s[i * b1 + j], s[j * b1 + i]);
  }
  const auto bad = sigcore::make_batch<double>(std::span(y).first(6), 1, 2, 3);
  EXPECT_THROW(sigcore::kernel_gram(bx, bad, config()), std::invalid_argument);
}

TEST(KernelBatch, SinglePrecision) {
  oracle::Rng rng(51);
  const Vec x = oracle::random_path(6, 2, rng, 0.3), y = oracle::random_path(5, 2, rng, 0.3);
  const std::vector<float> xf(x.begin(), x.end()), yf(y.begin(), y.end());
  const auto k = sigcore::kernel_batch<float>(sigcore::make_batch<float>(xf, 1, 6, 2),
                                              sigcore::make_batch<float>(yf, 1, 5, 2), config(1, 1));
  EXPECT_NEAR(k[0], solve(x, y, 2, config(1, 1)), 1e-5);
}
