#include "lbpopt/matrix_form.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "lbpopt/error.hpp"

namespace lbpopt {

std::vector<int> ExtensionMatrix::column_sums() const {
  std::vector<int> sums(kCodeCount, 0);
  for (LbpCode c : column_of_row) ++sums[c];
  return sums;
}

DenseMatrix ExtensionMatrix::to_dense() const {
  DenseMatrix e(rows(), cols());
  for (int j = 0; j < rows(); ++j) e(j, column_of_row[j]) = 1.0;
  return e;
}

ExtensionMatrix build_E(const LbpCodeMap& codes) { return {codes.side, codes.codes}; }

ExtensionMatrix build_E(LbpCodeMap&& codes) { return {codes.side, std::move(codes.codes)}; }

int TilingMatrix::grid() const noexcept {
  return static_cast<int>(std::lround(std::sqrt(static_cast<double>(regions))));
}

int TilingMatrix::region_side() const noexcept { return side / grid(); }

DenseMatrix TilingMatrix::to_dense() const {
  DenseMatrix t(rows(), cols());
  for (int j = 0; j < cols(); ++j) t(region_of_pixel[j], j) = 1.0;
  return t;
}

TilingMatrix build_T(int side, int regions) {
  if (side < 1) throw ConfigError("tiling needs a positive image side, got " + std::to_string(side));
  if (regions < 1) throw ConfigError("region count must be positive, got " + std::to_string(regions));
  const int grid = static_cast<int>(std::lround(std::sqrt(static_cast<double>(regions))));
  if (grid * grid != regions) {
    throw ConfigError("region count " + std::to_string(regions) + " is not a perfect square");
  }
  if (side % grid != 0) {
    throw ConfigError("region grid " + std::to_string(grid) + " does not divide image side " +
                      std::to_string(side));
  }
  const int cell = side / grid;
  TilingMatrix t{side, regions, std::vector<int>(static_cast<std::size_t>(side) * side)};
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) t.region_of_pixel[r * side + c] = (r / cell) * grid + c / cell;
  return t;
}

DenseMatrix HistogramMatrix::to_dense() const {
  DenseMatrix h(rows(), cols());
  for (int code = 0; code < kCodeCount; ++code) h(code, bin_of(code)) = 1.0;
  return h;
}

HistogramMatrix build_H(int bins) {
  if (bins < 1 || bins > kCodeCount || !std::has_single_bit(static_cast<unsigned>(bins))) {
    throw ConfigError("bin count must be a power of two in [1, 256], got " + std::to_string(bins));
  }
  return {bins};
}

DenseMatrix compose_F(const TilingMatrix& t, const ExtensionMatrix& e, const HistogramMatrix& h) {
  if (t.cols() != e.rows()) {
    throw ShapeError("tiling matrix has " + std::to_string(t.cols()) + " columns, E has " +
                     std::to_string(e.rows()) + " rows");
  }
  DenseMatrix f(t.rows(), h.cols());
  for (int j = 0; j < e.rows(); ++j) f(t.region_of_pixel[j], h.bin_of(e.column_of_row[j])) += 1.0;
  return f;
}

DenseMatrix compose_F(const DenseMatrix& t, const ExtensionMatrix& e, const DenseMatrix& h) {
  if (t.cols() != e.rows()) {
    throw ShapeError("left transform has " + std::to_string(t.cols()) + " columns, E has " +
                     std::to_string(e.rows()) + " rows");
  }
  if (h.rows() != ExtensionMatrix::cols()) {
    throw ShapeError("right transform has " + std::to_string(h.rows()) + " rows, expected 256");
  }
  // (T E)(i, c) accumulates T(i, j) over the pixels j with code c; then times H.
  DenseMatrix te(t.rows(), kCodeCount);
  for (int i = 0; i < t.rows(); ++i) {
    const auto ti = t.row(i);
    auto dst = te.row(i);
    for (int j = 0; j < e.rows(); ++j) dst[e.column_of_row[j]] += ti[j];
  }
  return multiply(te, h);
}

}  // namespace lbpopt
