#include <gtest/gtest.h>

#include <stdexcept>
#include <vector>

#include "alloc_counter.hpp"
#include "oracles.hpp"
#include "sigcore/tensor.hpp"

using sigcore::ChenTerms;
using sigcore::tensor_shape;
using Vec = std::vector<double>;

namespace {

Vec exp_of(Vec z, std::size_t depth) {
  return sigcore::tensor_exp<double>(z, tensor_shape(z.size(), depth));
}

Vec product(const Vec& a, const Vec& b, const sigcore::TensorShape& s) {
  Vec c(s.total(), 0.0);
  sigcore::mul_acc<double>(c, a, b, s);
  return c;
}

} // namespace

TEST(TensorShape, Offsets) {
  const auto s = tensor_shape(2, 3);
  ASSERT_EQ(s.offsets().size(), 4u);
  EXPECT_EQ(s.offsets()[0], 0u);
  EXPECT_EQ(s.offsets()[1], 2u);
  EXPECT_EQ(s.offsets()[2], 6u);
  EXPECT_EQ(s.total(), 14u);

  const auto one = tensor_shape(1, 4);
  EXPECT_EQ(one.offset(1), 0u);
  EXPECT_EQ(one.offset(2), 1u);
  EXPECT_EQ(one.offset(3), 2u);
  EXPECT_EQ(one.offset(4), 3u);
  EXPECT_EQ(one.total(), 4u);

  EXPECT_EQ(tensor_shape(3, 2).total(), 12u);
  EXPECT_EQ(tensor_shape(3, 2).level_size(2), 9u);
}

TEST(TensorShape, RejectsZero) {
  EXPECT_THROW(tensor_shape(0, 3), std::invalid_argument);
  EXPECT_THROW(tensor_shape(2, 0), std::invalid_argument);
}

TEST(TensorExp, ScalarSeries) {
  const Vec e = exp_of({1.0}, 3);
  ASSERT_EQ(e.size(), 3u);
  EXPECT_DOUBLE_EQ(e[0], 1.0);
  EXPECT_DOUBLE_EQ(e[1], 0.5);
  EXPECT_DOUBLE_EQ(e[2], 1.0 / 6.0);
}

TEST(TensorExp, ZeroIncrement) {
  for (const double v : exp_of({0.0, 0.0}, 2)) EXPECT_EQ(v, 0.0);
}

TEST(TensorExp, TwoDimensional) {
  EXPECT_EQ(exp_of({1.0, 2.0}, 2), (Vec{1, 2, 0.5, 1, 1, 2}));
}

TEST(TensorExp, DimensionMismatch) {
  Vec out(6);
  EXPECT_THROW(sigcore::tensor_exp<double>(Vec{1.0}, tensor_shape(2, 2), out), std::invalid_argument);
  Vec z{1.0, 2.0};
  Vec small(5);
  EXPECT_THROW(sigcore::tensor_exp<double>(z, tensor_shape(2, 2), small), std::invalid_argument);
}

TEST(TensorExp, MatchesNaiveWords) {
  oracle::Rng rng(11);
  for (std::size_t d : {1, 2, 3}) {
    Vec z(d);
    for (double& v : z) v = rng.uniform(-2, 2);
    const Vec path = [&] {
      Vec p(2 * d, 0.0);
      for (std::size_t c = 0; c < d; ++c) p[d + c] = z[c];
      return p;
    }();
    EXPECT_LT(oracle::rel_error(exp_of(z, 4), oracle::naive_signature(path, d, 4)), 1e-15);
  }
}

TEST(MulAcc, InverseInOneDimension) {
  const auto s = tensor_shape(1, 4);
  for (const double v : product(exp_of({1.0}, 4), exp_of({-1.0}, 4), s)) EXPECT_NEAR(v, 0.0, 1e-16);
}

TEST(MulAcc, ScalarDoubling) {
  const auto s = tensor_shape(1, 3);
  const Vec c = product(exp_of({1.0}, 3), exp_of({1.0}, 3), s);
  EXPECT_DOUBLE_EQ(c[0], 2.0);
  EXPECT_DOUBLE_EQ(c[1], 2.0);
  EXPECT_DOUBLE_EQ(c[2], 4.0 / 3.0);
}

TEST(MulAcc, OrthogonalSteps) {
  const auto s = tensor_shape(2, 2);
  const Vec c = product(exp_of({1.0, 0.0}, 2), exp_of({0.0, 1.0}, 2), s);
  EXPECT_EQ(c, (Vec{1, 1, 0.5, 1, 0, 0.5}));
}

TEST(MulAcc, CrossTermsOnly) {
  const auto s = tensor_shape(2, 2);
  const Vec a = exp_of({1.0, 0.0}, 2);
  const Vec b = exp_of({0.0, 1.0}, 2);
  Vec c(s.total(), 0.0);
  sigcore::mul_acc<double>(c, a, b, s, ChenTerms::cross);
  EXPECT_EQ(c, (Vec{0, 0, 0, 1, 0, 0}));
}

TEST(MulAcc, Accumulates) {
  const auto s = tensor_shape(1, 2);
  const Vec a = exp_of({1.0}, 2);
  Vec c{10.0, 20.0};
  sigcore::mul_acc<double>(c, a, a, s);
  EXPECT_DOUBLE_EQ(c[0], 12.0);
  EXPECT_DOUBLE_EQ(c[1], 22.0);
}

TEST(MulAcc, IdentityIsExact) {
  oracle::Rng rng(3);
  const auto s = tensor_shape(3, 4);
  Vec a(s.total());
  for (double& v : a) v = rng.uniform(-1, 1);
  const Vec id(s.total(), 0.0);
  EXPECT_EQ(product(a, id, s), a);
  EXPECT_EQ(product(id, a, s), a);
}

TEST(MulAcc, ShapeMismatch) {
  const auto s = tensor_shape(2, 2);
  Vec c(6), a(6), b(5);
  EXPECT_THROW(sigcore::mul_acc<double>(c, a, b, s), std::invalid_argument);
}

TEST(MulAcc, ParallelIncrementsCommute) {
  oracle::Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 1 + rng.index(3);
    const auto s = tensor_shape(d, 5);
    Vec z(d), w(d), sum(d);
    const double ratio = rng.uniform(-2, 2);
    for (std::size_t c = 0; c < d; ++c) {
      z[c] = rng.uniform(-1, 1);
      w[c] = ratio * z[c];
      sum[c] = z[c] + w[c];
    }
    EXPECT_LT(oracle::rel_error(product(exp_of(z, 5), exp_of(w, 5), s), exp_of(sum, 5)), 1e-14);
  }
}

TEST(ChenInplace, MatchesMulAcc) {
  oracle::Rng rng(7);
  const auto s = tensor_shape(3, 4);
  Vec a(s.total()), b(s.total());
  for (double& v : a) v = rng.uniform(-1, 1);
  for (double& v : b) v = rng.uniform(-1, 1);
  const Vec expected = product(a, b, s);
  sigcore::chen_inplace<double>(a, b, s);
  EXPECT_LT(oracle::rel_error(a, expected), 1e-15);
}

TEST(Dot, Examples) {
  const auto zero = exp_of({0.0}, 3);
  EXPECT_EQ(sigcore::dot<double>(zero, zero, tensor_shape(1, 3)), 1.0);
  const auto e = exp_of({1.0}, 3);
  EXPECT_NEAR(sigcore::dot<double>(e, e, tensor_shape(1, 3)), 1 + 1 + 0.25 + 1.0 / 36, 1e-15);
  Vec bad(2);
  EXPECT_THROW(sigcore::dot<double>(e, bad, tensor_shape(1, 3)), std::invalid_argument);
}

TEST(Dot, SymmetricAndAtLeastOne) {
  oracle::Rng rng(9);
  const auto s = tensor_shape(2, 4);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec x = oracle::random_path(6, 2, rng);
    const Vec y = oracle::random_path(4, 2, rng);
    const Vec a = oracle::naive_signature(x, 2, 4);
    const Vec b = oracle::naive_signature(y, 2, 4);
    EXPECT_EQ(sigcore::dot<double>(a, b, s), sigcore::dot<double>(b, a, s));
    EXPECT_GE(sigcore::dot<double>(a, a, s), 1.0);
  }
}

TEST(Dot, SinglePrecision) {
  const auto s = tensor_shape(1, 3);
  const auto e = sigcore::tensor_exp<float>(std::vector<float>{1.0f}, s);
  EXPECT_NEAR(sigcore::dot<float>(e, e, s), 2.2777778f, 1e-6f);
}

TEST(TensorCore, NoHeapAllocation) {
  const auto s = tensor_shape(3, 4);
  Vec z{0.1, -0.2, 0.3}, a(s.total()), b(s.total()), c(s.total(), 0.0);
  alloc_counter::Recording rec;
  sigcore::tensor_exp<double>(z, s, a);
  sigcore::tensor_exp<double>(z, s, b);
  sigcore::mul_acc<double>(c, a, b, s);
  sigcore::chen_inplace<double>(a, b, s);
  EXPECT_TRUE(rec.finish().empty());
}
