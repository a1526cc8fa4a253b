#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "support.hpp"

namespace cadence {
namespace {

constexpr KernelFamily kFamilies[] = {KernelFamily::Gaussian, KernelFamily::Laplace, KernelFamily::Cauchy};

std::vector<double> vec(std::initializer_list<double> v) { return v; }

TEST(KernelEval, SelfSimilarityIsOne) {
  Rng rng(1);
  for (auto f : kFamilies) {
    for (int i = 0; i < 50; ++i) {
      const Matrix x = testing::random_matrix(rng, 1, 4, -10, 10);
      const auto spec = KernelSpec::fixed(f, 0.1 + rng.uniform01() * 5);
      EXPECT_EQ(kernel_eval(spec, row_span(x, 0), row_span(x, 0)), 1.0);
    }
  }
}

TEST(KernelEval, HandValues) {
  const auto a = vec({0, 0}), b = vec({1, 1});
  EXPECT_NEAR(kernel_eval(KernelSpec::fixed(KernelFamily::Gaussian, 0.5), a, b), std::exp(-1.0), 1e-15);
  const auto c = vec({0}), d = vec({1});
  EXPECT_DOUBLE_EQ(kernel_eval(KernelSpec::fixed(KernelFamily::Cauchy, 1.0), c, d), 0.5);
  EXPECT_NEAR(kernel_eval(KernelSpec::fixed(KernelFamily::Laplace, 0.5), a, b), std::exp(-1.0), 1e-15);
}

TEST(KernelEval, BoundedSymmetricAndMatchesReference) {
  Rng rng(2);
  for (auto f : kFamilies) {
    for (int i = 0; i < 200; ++i) {
      const Matrix m = testing::random_matrix(rng, 2, 3, -2, 2);
      const double g = 0.05 + rng.uniform01() * 3;
      const auto spec = KernelSpec::fixed(f, g);
      const double k = kernel_eval(spec, row_span(m, 0), row_span(m, 1));
      EXPECT_GT(k, 0.0);
      EXPECT_LE(k, 1.0);
      EXPECT_EQ(k, kernel_eval(spec, row_span(m, 1), row_span(m, 0)));
      const auto rows = testing::rows_of(m);
      EXPECT_NEAR(k, testing::ref_kernel(f, g, rows[0], rows[1]), 1e-14);
    }
  }
}

TEST(KernelSpec, Validation) {
  EXPECT_THROW(KernelSpec::fixed(KernelFamily::Gaussian, 0.0), Error);
  EXPECT_THROW(KernelSpec::fixed(KernelFamily::Gaussian, -1.0), Error);
  EXPECT_THROW(KernelSpec::median().resolved_gamma(), Error);
  EXPECT_EQ(parse_kernel_family("laplace"), KernelFamily::Laplace);
  EXPECT_THROW(parse_kernel_family("rbf"), Error);
}

TEST(MedianGamma, HandExample) {
  Matrix p(3, 1);
  p << 0, 1, 2;
  EXPECT_EQ(median_gamma(p, KernelFamily::Gaussian), 0.5);
  EXPECT_EQ(median_gamma(p, KernelFamily::Cauchy), 0.5);
  EXPECT_EQ(median_gamma(p, KernelFamily::Laplace), 1.0);
}

TEST(MedianGamma, Degenerate) {
  Matrix p(2, 2);
  p << 1, 2, 1, 2;
  try {
    median_gamma(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegeneratePointSet);
  }
  // Median of zero with some positive distances falls back to the positive ones.
  Matrix q(5, 1);
  q << 0, 0, 0, 0, 2;
  EXPECT_DOUBLE_EQ(median_gamma(q), 1.0 / (2.0 * 4.0));
}

TEST(MedianGamma, ScaleCovariance) {
  Rng rng(3);
  for (int i = 0; i < 30; ++i) {
    const Matrix p = testing::random_matrix(rng, 5 + rng.uniform_index(40), 3);
    const double s = 0.1 + 10 * rng.uniform01();
    const double g = median_gamma(p, KernelFamily::Gaussian, 0);
    const double gs = median_gamma(p * s, KernelFamily::Gaussian, 0);
    EXPECT_NEAR(gs, g / (s * s), 1e-12 * std::max(1.0, g / (s * s)));
    const double gl = median_gamma(p, KernelFamily::Laplace, 0);
    EXPECT_NEAR(median_gamma(p * s, KernelFamily::Laplace, 0), gl / s, 1e-12 * std::max(1.0, gl / s));
  }
}

TEST(MedianGamma, SubsamplesDeterministically) {
  Rng rng(4);
  const Matrix p = testing::random_matrix(rng, 1500, 2);
  EXPECT_EQ(median_gamma(p, KernelFamily::Gaussian, 9), median_gamma(p, KernelFamily::Gaussian, 9));
  EXPECT_NEAR(median_gamma(p, KernelFamily::Gaussian, 9), median_gamma(p, KernelFamily::Gaussian, 10), 0.1);
}

TEST(Mmd2Batch, HandExample) {
  Matrix a(2, 1), b(2, 1);
  a << 0, 0;
  b << 1, 1;
  const double v = mmd2_batch(KernelSpec::fixed(KernelFamily::Gaussian, 1.0), a, b).value;
  EXPECT_NEAR(v, 2.0 - 2.0 * std::exp(-1.0), 1e-12);
}

TEST(Mmd2Batch, MatchesNaiveDoubleSum) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto f = kFamilies[i % 3];
    const double g = 0.05 + 2 * rng.uniform01();
    const Matrix a = testing::random_matrix(rng, 1 + rng.uniform_index(8), 3);
    const Matrix b = testing::random_matrix(rng, 1 + rng.uniform_index(8), 3, -0.5, 1.5);
    const double got = mmd2_batch(KernelSpec::fixed(f, g), a, b).value;
    EXPECT_NEAR(got, std::max(0.0, testing::naive_mmd2(f, g, a, b)), 1e-10) << "instance " << i;
  }
}

TEST(Mmd2Batch, MedianDirectiveUsesUnionOfRows) {
  Rng rng(6);
  const Matrix a = testing::random_matrix(rng, 6, 2);
  const Matrix b = testing::random_matrix(rng, 7, 2, 0, 2);
  Matrix both(13, 2);
  both << a, b;
  const double g = median_gamma(both, KernelFamily::Gaussian);
  EXPECT_NEAR(mmd2_batch(KernelSpec::median(), a, b).value, testing::naive_mmd2(KernelFamily::Gaussian, g, a, b), 1e-12);
}

TEST(Mmd2Batch, IdentitySymmetryAndPermutation) {
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const auto spec = KernelSpec::fixed(kFamilies[i % 3], 0.1 + rng.uniform01());
    const Matrix a = testing::random_matrix(rng, 2 + rng.uniform_index(8), 3);
    const Matrix b = testing::random_matrix(rng, 2 + rng.uniform_index(8), 3);
    EXPECT_NEAR(mmd2_batch(spec, a, a).value, 0.0, 1e-12);
    const double ab = mmd2_batch(spec, a, b).value;
    EXPECT_EQ(ab, mmd2_batch(spec, b, a).value);
    EXPECT_GE(ab, 0.0);

    std::vector<Eigen::Index> perm(static_cast<std::size_t>(a.rows()));
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t k = perm.size() - 1; k > 0; --k) std::swap(perm[k], perm[rng.uniform_index(k + 1)]);
    Matrix ap(a.rows(), a.cols());
    for (std::size_t k = 0; k < perm.size(); ++k) ap.row(static_cast<Eigen::Index>(k)) = a.row(perm[k]);
    EXPECT_NEAR(mmd2_batch(spec, ap, b).value, ab, 1e-12);
  }
}

TEST(Mmd2Batch, AllIdenticalRowsUnderMedianIsZero) {
  Matrix a = Matrix::Constant(4, 2, 0.3);
  EXPECT_EQ(mmd2_batch(KernelSpec::median(), a, a).value, 0.0);
}

TEST(MmdPair, Examples) {
  const auto spec = KernelSpec::fixed(KernelFamily::Gaussian, 0.5);
  const auto x = vec({0.25, -1}), y = vec({1.25, 0});
  EXPECT_EQ(mmd_pair(spec, x, x).value, 0.0);
  EXPECT_NEAR(mmd_pair(spec, x, y).value, 2.0 * (1.0 - std::exp(-1.0)), 1e-15);
  EXPECT_EQ(mmd_pair(spec, x, y).estimator, MmdEstimator::SinglePair);
}

TEST(MmdPair, PositiveForDistinctAndMatchesSingletonBatch) {
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const auto spec = KernelSpec::fixed(kFamilies[i % 3], 0.1 + rng.uniform01());
    const Matrix a = testing::random_matrix(rng, 1, 3), b = testing::random_matrix(rng, 1, 3);
    const double pair = mmd_pair(spec, row_span(a, 0), row_span(b, 0)).value;
    EXPECT_GT(pair, 0.0);
    EXPECT_LT(pair, 2.0);
    EXPECT_EQ(pair, mmd2_batch(spec, a, b).value);
  }
}

TEST(Mmd2BatchWithGrad, ValueAndFiniteDifferences) {
  Rng rng(10);
  constexpr double h = 1e-6;
  for (int i = 0; i < 15; ++i) {
    const auto f = kFamilies[i % 3];
    const auto spec = KernelSpec::fixed(f, 0.2 + rng.uniform01());
    Matrix a = testing::random_matrix(rng, 2 + rng.uniform_index(4), 2);
    Matrix b = testing::random_matrix(rng, 2 + rng.uniform_index(4), 2);
    Matrix ga, gb;
    const double v = mmd2_batch_with_grad(spec, a, b, ga, gb);
    EXPECT_NEAR(v, testing::naive_mmd2(f, spec.resolved_gamma(), a, b), 1e-12);
    for (Matrix* side : {&a, &b}) {
      const Matrix& g = side == &a ? ga : gb;
      for (Eigen::Index r = 0; r < side->rows(); ++r)
        for (Eigen::Index c = 0; c < side->cols(); ++c) {
          const double keep = (*side)(r, c);
          (*side)(r, c) = keep + h;
          const double up = testing::naive_mmd2(f, spec.resolved_gamma(), a, b);
          (*side)(r, c) = keep - h;
          const double down = testing::naive_mmd2(f, spec.resolved_gamma(), a, b);
          (*side)(r, c) = keep;
          EXPECT_LT(testing::relative_error(g(r, c), (up - down) / (2 * h), 1e-5), 1e-4)
              << to_string(f) << " instance " << i;
        }
    }
  }
}

}  // namespace
}  // namespace cadence
