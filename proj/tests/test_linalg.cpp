#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "lbpopt/error.hpp"
#include "lbpopt/linalg.hpp"
#include "support.hpp"

using namespace lbpopt;
namespace t = lbpopt::testing;

namespace {

Eigen::MatrixXd to_eigen(const DenseMatrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

DenseMatrix symmetric_random(int n, Rng& rng) {
  DenseMatrix a = t::random_matrix(n, n, rng);
  DenseMatrix s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

double max_orthonormality_error(const std::vector<std::vector<double>>& cols) {
  double worst = 0.0;
  for (std::size_t i = 0; i < cols.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      worst = std::max(worst, std::abs(dot(cols[i], cols[j]) - (i == j ? 1.0 : 0.0)));
  return worst;
}

DenseMatrix reconstruct(const SvdTriplet& s, int rows, int cols) {
  DenseMatrix out(rows, cols);
  for (std::size_t k = 0; k < s.u_cols.size(); ++k)
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) out(i, j) += s.sigmas[k] * s.u_cols[k][i] * s.v_cols[k][j];
  return out;
}

}  // namespace

TEST(Frobenius, Basics) {
  EXPECT_EQ(frobenius_norm(DenseMatrix(3, 4)), 0.0);
  EXPECT_DOUBLE_EQ(frobenius_norm(DenseMatrix::identity(2)), std::sqrt(2.0));
}

TEST(Frobenius, MatchesDirectSum) {
  Rng rng(1);
  const DenseMatrix m = t::random_matrix(5, 5, rng);
  EXPECT_NEAR(frobenius_norm(m), t::naive_frobenius(m), 1e-12 * t::naive_frobenius(m));
}

TEST(Gram, IdentityAndSingleColumn) {
  EXPECT_EQ(gram(DenseMatrix::identity(4)), DenseMatrix::identity(4));
  DenseMatrix m(3, 4);
  m(0, 2) = 2.0;
  m(2, 2) = 1.0;
  const DenseMatrix g = gram(m);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_EQ(g(i, j), (i == 2 && j == 2) ? 5.0 : 0.0);
}

TEST(Gram, SymmetricAndMatchesNaive) {
  Rng rng(2);
  const DenseMatrix m = t::random_matrix(6, 4, rng);
  const DenseMatrix g = gram(m);
  const DenseMatrix oracle = t::naive_multiply(t::naive_transpose(m), m);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      EXPECT_NEAR(g(i, j), g(j, i), 1e-14);
      EXPECT_NEAR(g(i, j), oracle(i, j), 1e-12);
    }
}

TEST(SymmetricEig, Diagonal) {
  DenseMatrix g(3, 3);
  g(0, 0) = 3;
  g(1, 1) = 1;
  g(2, 2) = 2;
  const auto e = symmetric_eig(g);
  EXPECT_EQ(e.values, (std::vector<double>{3, 2, 1}));
  const int expected_row[3] = {0, 2, 1};
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i) EXPECT_EQ(std::abs(e.vectors(i, k)), i == expected_row[k] ? 1.0 : 0.0);
}

TEST(SymmetricEig, RankOne) {
  Rng rng(3);
  const auto v = t::random_unit(6, rng);
  DenseMatrix g(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) g(i, j) = v[i] * v[j];
  const auto e = symmetric_eig(g);
  EXPECT_NEAR(e.values[0], 1.0, 1e-12);
  for (int k = 1; k < 6; ++k) EXPECT_NEAR(e.values[k], 0.0, 1e-12);
  const double d = std::abs(dot(e.vectors.column(0), v));
  EXPECT_NEAR(d, 1.0, 1e-12);
}

TEST(SymmetricEig, ReconstructsRandom) {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const DenseMatrix g = symmetric_random(8, rng);
    const auto e = symmetric_eig(g);
    DenseMatrix back(8, 8);
    for (int k = 0; k < 8; ++k)
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) back(i, j) += e.values[k] * e.vectors(i, k) * e.vectors(j, k);
    EXPECT_LE(t::naive_frobenius(g - back), 1e-9 * t::naive_frobenius(g));
    EXPECT_TRUE(std::is_sorted(e.values.rbegin(), e.values.rend()));
    std::vector<std::vector<double>> cols;
    for (int k = 0; k < 8; ++k) cols.push_back(e.vectors.column(k));
    EXPECT_LE(max_orthonormality_error(cols), 1e-8);
  }
}

TEST(SymmetricEig, AgreesWithEigenSolver) {
  Rng rng(5);
  const DenseMatrix g = symmetric_random(20, rng);
  const auto mine = symmetric_eig(g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(g));
  for (int k = 0; k < 20; ++k) EXPECT_NEAR(mine.values[k], es.eigenvalues()(19 - k), 1e-10);
}

TEST(SymmetricEig, RejectsAsymmetric) {
  DenseMatrix g = DenseMatrix::identity(3);
  g(0, 1) = 0.5;
  EXPECT_THROW(symmetric_eig(g), DomainError);
  EXPECT_THROW(symmetric_eig(DenseMatrix(2, 3)), ShapeError);
}

TEST(SymmetricEig, SweepCapIsNumericalError) {
  Rng rng(6);
  Tolerances tight = kTolerances;
  tight.jacobi_max_sweeps = 1;
  EXPECT_THROW(symmetric_eig(symmetric_random(12, rng), tight), NumericalError);
}

TEST(TruncatedSvd, Diagonal) {
  DenseMatrix m(2, 2);
  m(0, 0) = 2;
  m(1, 1) = 1;
  const auto s = truncated_svd(m, 2);
  EXPECT_NEAR(s.sigmas[0], 2.0, 1e-14);
  EXPECT_NEAR(s.sigmas[1], 1.0, 1e-14);
  EXPECT_EQ(s.v_cols[0], (std::vector<double>{1, 0}));
  EXPECT_EQ(s.v_cols[1], (std::vector<double>{0, 1}));
}

TEST(TruncatedSvd, RankOne) {
  Rng rng(7);
  const auto u = t::random_unit(9, rng);
  const auto v = t::random_unit(5, rng);
  DenseMatrix m(9, 5);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 5; ++j) m(i, j) = 3.0 * u[i] * v[j];
  const auto s = truncated_svd(m, 3);
  EXPECT_NEAR(s.sigmas[0], 3.0, 1e-9);
  EXPECT_NEAR(std::abs(dot(s.v_cols[0], v)), 1.0, 1e-9);
  EXPECT_TRUE(s.rank_deficient());
  EXPECT_EQ(s.u_cols.size(), 1u);
}

TEST(TruncatedSvd, ReconstructsRandom) {
  Rng rng(8);
  const DenseMatrix m = t::random_matrix(20, 6, rng);
  const auto s = truncated_svd(m, 6);
  EXPECT_LE(t::naive_frobenius(m - reconstruct(s, 20, 6)), 1e-8 * t::naive_frobenius(m));
}

TEST(TruncatedSvd, AgreesWithEigenJacobiSvd) {
  Rng rng(9);
  for (auto [r, c] : {std::pair{30, 12}, std::pair{12, 30}, std::pair{64, 256}}) {
    const DenseMatrix m = t::random_matrix(r, c, rng);
    const int k = std::min(r, c);
    const auto s = truncated_svd(m, k);
    Eigen::JacobiSVD<Eigen::MatrixXd> es(to_eigen(m), Eigen::ComputeThinV);
    for (int i = 0; i < k; ++i) {
      EXPECT_NEAR(s.sigmas[i], es.singularValues()(i), 1e-9 * es.singularValues()(0));
      Eigen::VectorXd ev = es.matrixV().col(i);
      EXPECT_NEAR(std::abs(Eigen::Map<const Eigen::VectorXd>(s.v_cols[i].data(), c).dot(ev)), 1.0, 1e-8);
    }
  }
}

TEST(TruncatedSvd, KOutOfRange) {
  DenseMatrix m = DenseMatrix::identity(3);
  EXPECT_THROW(truncated_svd(m, 0), DomainError);
  EXPECT_THROW(truncated_svd(m, 4), DomainError);
}

TEST(TruncatedSvd, SignConvention) {
  Rng rng(10);
  const auto s = truncated_svd(t::random_matrix(10, 7, rng), 7);
  for (const auto& v : s.v_cols) {
    const auto it = std::max_element(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    EXPECT_GT(*it, 0.0);
  }
}

TEST(LeadingSingular, ScaledBasisVector) {
  DenseMatrix m(3, 3);
  m(0, 0) = 3;
  const auto p = leading_right_singular(m);
  EXPECT_NEAR(p.sigma, 3.0, 1e-12);
  EXPECT_NEAR(p.v[0], 1.0, 1e-12);
  EXPECT_NEAR(p.v[1], 0.0, 1e-12);
}

TEST(LeadingSingular, TiedSigma) {
  DenseMatrix m(2, 2);
  m(0, 0) = 5;
  m(1, 1) = 5;
  const auto p = leading_right_singular(m);
  EXPECT_NEAR(p.sigma, 5.0, 1e-12);
  EXPECT_NEAR(norm2(p.v), 1.0, 1e-12);
  const auto mv = multiply(m, p.v);
  EXPECT_NEAR(norm2(mv), 5.0, 1e-12);
}

TEST(LeadingSingular, ZeroIsDegenerate) { EXPECT_THROW(leading_right_singular(DenseMatrix(4, 4)), DegenerateInputError); }

TEST(LeadingSingular, MatchesTruncatedSvd) {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const DenseMatrix m = t::random_matrix(30, 10, rng);
    const auto p = leading_right_singular(m);
    const auto s = truncated_svd(m, 1);
    EXPECT_NEAR(p.sigma, s.sigmas[0], 1e-9 * s.sigmas[0]);
    EXPECT_NEAR(std::abs(dot(p.v, s.v_cols[0])), 1.0, 1e-8);
  }
}

TEST(LeadingSingular, StartVectorOrthogonalToTop) {
  // Equal column norms make the start vector (1,1)/sqrt2, exactly the
  // eigenvector of the smaller Gram eigenvalue.
  const DenseMatrix m(2, 2, std::vector<double>{2, -1, -1, 2});
  const auto p = leading_right_singular(m);
  EXPECT_NEAR(p.sigma, 3.0, 1e-10);
  EXPECT_NEAR(std::abs(p.v[0]), std::sqrt(0.5), 1e-10);
  EXPECT_NEAR(p.v[0], -p.v[1], 1e-10);
}

TEST(LeadingSingular, Deterministic) {
  Rng rng(12);
  const DenseMatrix m = t::random_matrix(40, 30, rng);
  const auto a = leading_right_singular(m);
  const auto b = leading_right_singular(m);
  EXPECT_EQ(a.sigma, b.sigma);
  EXPECT_EQ(a.v, b.v);
}

TEST(FixSign, LargestMagnitudePositive) {
  std::vector<double> v{0.1, -0.9, 0.3};
  fix_sign(v);
  EXPECT_EQ(v, (std::vector<double>{-0.1, 0.9, -0.3}));
}

TEST(LeadingPairBound, BilinearFormBoundedBySigmaOne) {
  Rng rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    const DenseMatrix m = t::random_matrix(16, 40, rng);
    const auto s = truncated_svd(m, 1);
    for (int k = 0; k < 1000; ++k) {
      const auto u = t::random_unit(16, rng);
      const auto v = t::random_unit(40, rng);
      EXPECT_LE(std::abs(dot(u, multiply(m, v))), s.sigmas[0] + 1e-8);
    }
    EXPECT_NEAR(dot(s.u_cols[0], multiply(m, s.v_cols[0])), s.sigmas[0], 1e-8);
  }
}

TEST(ProjectionBound, OrthonormalProjectionsBoundedBySigmaSum) {
  Rng rng(14);
  const int rows = 24, cols = 40, k = 5;
  const DenseMatrix m = t::random_matrix(rows, cols, rng);
  const auto s = truncated_svd(m, k);
  double sigma_sum = 0.0, sigma_sq = 0.0;
  for (double x : s.sigmas) {
    sigma_sum += x;
    sigma_sq += x * x;
  }
  for (int trial = 0; trial < 100; ++trial) {
    const auto tl = t::random_orthonormal(rows, k, rng);
    const auto hr = t::random_orthonormal(cols, k, rng);
    DenseMatrix f(k, k);
    for (int i = 0; i < k; ++i) {
      const auto mh = multiply(m, hr[i]);
      for (int j = 0; j < k; ++j) f(j, i) = dot(tl[j], mh);
    }
    EXPECT_LE(t::naive_frobenius(f), sigma_sum + 1e-6);
    // The optimum over orthonormal pairs is the root sum of squares.
    EXPECT_LE(t::naive_frobenius(f), std::sqrt(sigma_sq) + 1e-8);
  }
  DenseMatrix f(k, k);
  for (int i = 0; i < k; ++i) {
    const auto mv = multiply(m, s.v_cols[i]);
    for (int j = 0; j < k; ++j) f(j, i) = dot(s.u_cols[j], mv);
  }
  for (int i = 0; i < k; ++i) EXPECT_NEAR(f(i, i), s.sigmas[i], 1e-8);
  EXPECT_NEAR(t::naive_frobenius(f), std::sqrt(sigma_sq), 1e-8);
  double trace = 0.0;
  for (int i = 0; i < k; ++i) trace += f(i, i);
  EXPECT_NEAR(trace, sigma_sum, 1e-8);
}
