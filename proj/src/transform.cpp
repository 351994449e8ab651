#include "lbpopt/transform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lbpopt/error.hpp"
#include "lbpopt/matrix_form.hpp"

namespace lbpopt {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::standard: return "standard";
    case Method::svd: return "svd";
    case Method::optimal: return "optimal";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "standard") return Method::standard;
  if (name == "svd") return Method::svd;
  if (name == "optimal") return Method::optimal;
  throw ConfigError("unknown method '" + std::string(name) + "' (expected standard, svd or optimal)");
}

namespace {

void check_mean_inputs(std::span<const LbpCodeMap> codes) {
  if (codes.empty()) throw DomainError("mean LBP matrix needs at least one image");
  const int side = codes.front().side;
  if (side > kMaxDenseSide) {
    throw ConfigError("image side " + std::to_string(side) + " exceeds the dense limit " +
                      std::to_string(kMaxDenseSide));
  }
  for (const auto& map : codes) {
    if (map.side != side) {
      throw ShapeError("mixed image sizes in mean LBP matrix: " + std::to_string(side) + " and " +
                       std::to_string(map.side));
    }
  }
}

void scale_counts(MeanLbpMatrix& mean) {
  const double inv = 1.0 / static_cast<double>(mean.image_count);
  for (double& x : mean.values.values()) x *= inv;
}

}  // namespace

namespace reference {

MeanLbpMatrix mean_E(std::span<const LbpCodeMap> codes) {
  check_mean_inputs(codes);
  const int side = codes.front().side;
  MeanLbpMatrix mean{side, static_cast<int>(codes.size()), DenseMatrix(side * side, kCodeCount)};
  for (const auto& map : codes)
    for (int j = 0; j < side * side; ++j) mean.values(j, map.codes[j]) += 1.0;
  scale_counts(mean);
  return mean;
}

}  // namespace reference

MeanLbpMatrix mean_E(std::span<const LbpCodeMap> codes, Exec exec) {
  if (exec == Exec::serial) return reference::mean_E(codes);
  check_mean_inputs(codes);
  const int side = codes.front().side;
  const int pixels = side * side;
  MeanLbpMatrix mean{side, static_cast<int>(codes.size()), DenseMatrix(pixels, kCodeCount)};
  // Each thread owns a band of pixel rows; counts are integers, so the result
  // does not depend on the partition.
#pragma omp parallel for schedule(static)
  for (int j = 0; j < pixels; ++j) {
    auto row = mean.values.row(j);
    for (const auto& map : codes) row[map.codes[j]] += 1.0;
  }
  scale_counts(mean);
  return mean;
}

MeanLbpMatrix mean_E(std::span<const GrayImage> images, Exec exec) {
  if (images.empty()) throw DomainError("mean LBP matrix needs at least one image");
  for (const auto& image : images) {
    if (image.side() != images.front().side()) {
      throw ShapeError("mixed image sizes in mean LBP matrix: " +
                       std::to_string(images.front().side()) + " and " + std::to_string(image.side()));
    }
  }
  const auto maps = encode_images(images, exec);
  return mean_E(std::span<const LbpCodeMap>(maps), exec);
}

ClassDifference class_difference(const MeanLbpMatrix& first, const MeanLbpMatrix& second) {
  if (first.side != second.side || first.values.rows() != second.values.rows() ||
      first.values.cols() != second.values.cols()) {
    throw ShapeError("class means have different shapes (" + std::to_string(first.side) + " vs " +
                     std::to_string(second.side) + ")");
  }
  return {first.side, second.values - first.values};
}

TransformPair standard_transforms(int side, int l, int m) {
  const TilingMatrix t = build_T(side, l);
  const HistogramMatrix h = build_H(m);
  TransformPair pair;
  pair.method = Method::standard;
  pair.side = side;
  pair.l = l;
  pair.m = m;
  pair.left = t.to_dense();
  pair.right = h.to_dense();
  pair.zero_rows.assign(l, false);
  return pair;
}

namespace {

void check_difference(const ClassDifference& d) {
  if (d.values.cols() != kCodeCount || d.values.rows() != d.side * d.side) {
    throw ShapeError("class difference must be n^2 x 256");
  }
  if (frobenius_norm(d.values) <= kTolerances.zero_norm) {
    throw DegenerateInputError("class difference is the zero matrix; the classes are indistinguishable");
  }
}

void check_feature_count(int m) {
  if (m < 1 || m > kCodeCount) {
    throw ConfigError("feature count m must lie in [1, 256], got " + std::to_string(m));
  }
}

}  // namespace

TransformPair fit_svd_transforms(const ClassDifference& d, int l, int m) {
  check_feature_count(m);
  if (l != m) {
    throw ConfigError("SVD transforms need l = m for diagonal features, got l=" + std::to_string(l) +
                      " m=" + std::to_string(m));
  }
  check_difference(d);
  const SvdTriplet svd = truncated_svd(d.values, m);
  const int pixels = d.values.rows();

  TransformPair pair;
  pair.method = Method::svd;
  pair.side = d.side;
  pair.l = l;
  pair.m = m;
  pair.left = DenseMatrix(l, pixels);
  pair.right = DenseMatrix(kCodeCount, m);
  pair.zero_rows.assign(l, true);
  for (int i = 0; i < m; ++i) {
    for (int c = 0; c < kCodeCount; ++c) pair.right(c, i) = svd.v_cols[i][c];
    if (static_cast<std::size_t>(i) < svd.u_cols.size()) {
      std::copy(svd.u_cols[i].begin(), svd.u_cols[i].end(), pair.left.row(i).begin());
      pair.zero_rows[i] = false;
    }
  }
  return pair;
}

namespace {

// v_1 of D restricted to the active columns; zero columns contribute nothing.
// Iterates on whichever of D_A^T D_A and D_A D_A^T is smaller; both share
// the leading eigenvalue and v_1 = D_A^T u_1 / sigma_1.
std::vector<double> leading_active_direction(const DenseMatrix& work, const DenseMatrix& g,
                                             const std::vector<int>& active) {
  const int k = static_cast<int>(active.size());
  const int rows = work.rows();
  if (k <= rows) {
    DenseMatrix sub(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) sub(a, b) = g(active[a], active[b]);
    return leading_right_singular_gram(sub).v;
  }
  DenseMatrix at(k, rows);
  for (int a = 0; a < k; ++a)
    for (int r = 0; r < rows; ++r) at(a, r) = work(r, active[a]);
  const SingularPair lead = leading_right_singular_gram(gram(at));
  std::vector<double> v = multiply(at, lead.v);
  const double norm = norm2(v);
  for (double& x : v) x /= norm;
  fix_sign(v);
  return v;
}

}  // namespace

TransformPair fit_optimal_transforms(const ClassDifference& d, int m) {
  check_feature_count(m);
  check_difference(d);

  DenseMatrix work = d.values;
  DenseMatrix g = gram(work);
  const int pixels = work.rows();

  TransformPair pair;
  pair.method = Method::optimal;
  pair.side = d.side;
  pair.l = m;
  pair.m = m;
  pair.left = DenseMatrix(m, pixels);
  pair.right = DenseMatrix(kCodeCount, m);
  pair.zero_rows.assign(m, false);

  std::vector<bool> taken(kCodeCount, false);
  std::vector<int> active;
  for (int i = 0; i < m; ++i) {
    active.clear();
    for (int c = 0; c < kCodeCount; ++c)
      if (!taken[c] && g(c, c) > 0.0) active.push_back(c);

    int ind;
    if (active.empty()) {
      // Everything is deflated away; fill with the smallest unused codes.
      ind = static_cast<int>(std::find(taken.begin(), taken.end(), false) - taken.begin());
    } else {
      const std::vector<double> v = leading_active_direction(work, g, active);
      int best = 0;
      for (int a = 1; a < static_cast<int>(active.size()); ++a)
        if (std::abs(v[a]) > std::abs(v[best])) best = a;
      ind = active[best];
    }

    taken[ind] = true;
    pair.selected_codes.push_back(ind);
    pair.right(ind, i) = 1.0;

    // t_i = D h_i is column ind of the current D.
    auto t = pair.left.row(i);
    for (int r = 0; r < pixels; ++r) t[r] = work(r, ind);
    const double norm = norm2(t);
    if (norm <= kTolerances.zero_norm) {
      std::fill(t.begin(), t.end(), 0.0);
      pair.zero_rows[i] = true;
    } else {
      for (double& x : t) x /= norm;
    }

    // D <- D - (D h_i) h_i^T zeroes column ind; G loses row and column ind.
    for (int r = 0; r < pixels; ++r) work(r, ind) = 0.0;
    for (int c = 0; c < kCodeCount; ++c) {
      g(ind, c) = 0.0;
      g(c, ind) = 0.0;
    }
  }
  return pair;
}

ClassDifference one_vs_rest_difference(std::span<const MeanLbpMatrix> class_means, int k,
                                       RestWeighting weighting) {
  const int classes = static_cast<int>(class_means.size());
  if (classes < 2) throw DomainError("one-vs-rest needs at least two classes");
  if (k < 0 || k >= classes) throw DomainError("class index out of range");
  const auto& own = class_means[k];
  MeanLbpMatrix rest{own.side, 0, DenseMatrix(own.values.rows(), own.values.cols())};
  double total_weight = 0.0;
  for (int j = 0; j < classes; ++j) {
    if (j == k) continue;
    const auto& other = class_means[j];
    if (other.side != own.side) throw ShapeError("class means have different image sizes");
    const double w = weighting == RestWeighting::pooled ? other.image_count : 1.0;
    total_weight += w;
    rest.image_count += other.image_count;
    auto dst = rest.values.values();
    const auto src = other.values.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += w * src[i];
  }
  for (double& x : rest.values.values()) x /= total_weight;
  return class_difference(rest, own);
}

std::vector<TransformPair> fit_multiclass(std::span<const MeanLbpMatrix> class_means, int m,
                                          Method method, RestWeighting weighting) {
  if (class_means.size() < 2) throw DomainError("multiclass fitting needs at least two classes");
  if (method == Method::standard) {
    throw ConfigError("standard transforms are fixed; there is nothing to fit per class");
  }
  std::vector<TransformPair> pairs;
  for (int k = 0; k < static_cast<int>(class_means.size()); ++k) {
    const ClassDifference d = one_vs_rest_difference(class_means, k, weighting);
    pairs.push_back(method == Method::svd ? fit_svd_transforms(d, m, m) : fit_optimal_transforms(d, m));
  }
  return pairs;
}

double residual(const DenseMatrix& d, const DenseMatrix& h) {
  const DenseMatrix dh = multiply(d, h);
  return frobenius_norm(d - multiply(dh, h.transposed()));
}

ResidualCurve residual_curve(const DenseMatrix& d, const DenseMatrix& nested, int m_max,
                             Method method) {
  if (nested.rows() != d.cols()) throw ShapeError("residual transform rows must match D columns");
  if (m_max < 1 || m_max > nested.cols()) {
    throw DomainError("residual curve length " + std::to_string(m_max) + " outside [1, " +
                      std::to_string(nested.cols()) + "]");
  }
  ResidualCurve curve{method, {}};
  DenseMatrix rest = d;
  std::vector<int> support;
  std::vector<double> dh(d.rows());
  for (int i = 0; i < m_max; ++i) {
    support.clear();
    for (int c = 0; c < nested.rows(); ++c)
      if (nested(c, i) != 0.0) support.push_back(c);
    for (int r = 0; r < d.rows(); ++r) {
      double s = 0.0;
      for (int c : support) s += d(r, c) * nested(c, i);
      dh[r] = s;
    }
    for (int r = 0; r < d.rows(); ++r) {
      if (dh[r] == 0.0) continue;
      for (int c : support) rest(r, c) -= dh[r] * nested(c, i);
    }
    curve.points.push_back({i + 1, frobenius_norm(rest)});
  }
  return curve;
}

ResidualCurve standard_residual_curve(const DenseMatrix& d, int m_max) {
  if (m_max < 1 || m_max > kCodeCount) throw DomainError("residual curve length outside [1, 256]");
  ResidualCurve curve{Method::standard, {}};
  for (int m = 1; m <= m_max; m *= 2) {
    DenseMatrix h = build_H(m).to_dense();
    const double scale = 1.0 / std::sqrt(static_cast<double>(kCodeCount / m));
    for (double& x : h.values()) x *= scale;
    curve.points.push_back({m, residual(d, h)});
  }
  return curve;
}

ResidualCurve method_residual_curve(const ClassDifference& d, Method method, int m_max) {
  switch (method) {
    case Method::standard: return standard_residual_curve(d.values, m_max);
    case Method::svd: {
      check_difference(d);
      const SvdTriplet svd = truncated_svd(d.values, m_max);
      DenseMatrix v(kCodeCount, m_max);
      for (int i = 0; i < m_max; ++i)
        for (int c = 0; c < kCodeCount; ++c) v(c, i) = svd.v_cols[i][c];
      return residual_curve(d.values, v, m_max, Method::svd);
    }
    case Method::optimal: {
      const TransformPair pair = fit_optimal_transforms(d, m_max);
      return residual_curve(d.values, pair.right, m_max, Method::optimal);
    }
  }
  throw ConfigError("unknown method");
}

}  // namespace lbpopt
