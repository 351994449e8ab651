#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lbpopt/lbp.hpp"
#include "lbpopt/linalg.hpp"

namespace lbpopt {

enum class Method { standard, svd, optimal };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);  // throws ConfigError

// Mean of the one-hot extension matrices of a set of images (n^2 x 256).
struct MeanLbpMatrix {
  int side = 0;
  int image_count = 0;
  DenseMatrix values;
};

// Largest side for which the dense n^2 x 256 mean/difference matrices are built.
inline constexpr int kMaxDenseSide = 128;

// Throws DomainError for an empty set and ShapeError for mixed sizes.
MeanLbpMatrix mean_E(std::span<const GrayImage> images, Exec exec = Exec::parallel);
MeanLbpMatrix mean_E(std::span<const LbpCodeMap> codes, Exec exec = Exec::parallel);

namespace reference {
MeanLbpMatrix mean_E(std::span<const LbpCodeMap> codes);
}

// second - first (the second class relative to the first).
struct ClassDifference {
  int side = 0;
  DenseMatrix values;
};

ClassDifference class_difference(const MeanLbpMatrix& first, const MeanLbpMatrix& second);

// Left transform T (l x n^2) and right transform H (256 x m). Learned
// features are diag(T E H); standard features are the full T E H.
struct TransformPair {
  Method method = Method::standard;
  int side = 0;
  int l = 0;
  int m = 0;
  DenseMatrix left;
  DenseMatrix right;
  std::vector<int> selected_codes;  // optimal: one-hot index of each H column, in order
  std::vector<bool> zero_rows;      // left rows with no usable direction
};

TransformPair standard_transforms(int side, int l, int m);

// T = first l left singular vectors (transposed), H = first m right singular
// vectors. Requires l = m. Rows of T past the numerical rank are zero-flagged.
TransformPair fit_svd_transforms(const ClassDifference& d, int l, int m);

// Greedy one-hot selection with column deflation.
TransformPair fit_optimal_transforms(const ClassDifference& d, int m);

enum class RestWeighting {
  unweighted,  // plain mean of the other class means
  pooled,      // other class means weighted by their image counts
};

// One-vs-rest: class k is fitted against the mean of the remaining classes,
// D_k = mean_k - rest_k.
std::vector<TransformPair> fit_multiclass(std::span<const MeanLbpMatrix> class_means, int m,
                                          Method method = Method::optimal,
                                          RestWeighting weighting = RestWeighting::unweighted);

ClassDifference one_vs_rest_difference(std::span<const MeanLbpMatrix> class_means, int k,
                                       RestWeighting weighting = RestWeighting::unweighted);

struct ResidualPoint {
  int m = 0;
  double residual = 0.0;
};

struct ResidualCurve {
  Method method = Method::standard;
  std::vector<ResidualPoint> points;
};

// ||D - (D H) H^T||_F, computed directly.
double residual(const DenseMatrix& d, const DenseMatrix& h);

// R(m') for m' = 1..m_max, where H_{m'} is the first m' columns of `nested`.
// Uses D - D H H^T = D - sum_i (D h_i) h_i^T, one column at a time.
ResidualCurve residual_curve(const DenseMatrix& d, const DenseMatrix& nested, int m_max,
                             Method method);

// Standard bins cannot be nested, so each m (a power of two up to m_max) is
// evaluated separately with the indicator columns rescaled to unit norm.
ResidualCurve standard_residual_curve(const DenseMatrix& d, int m_max);

// Fits the requested method up to m_max and returns its residual curve.
ResidualCurve method_residual_curve(const ClassDifference& d, Method method, int m_max);

}  // namespace lbpopt
