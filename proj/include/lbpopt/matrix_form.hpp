#pragma once

#include <vector>

#include "lbpopt/lbp.hpp"
#include "lbpopt/linalg.hpp"

namespace lbpopt {

// E: n^2 x 256, row j one-hot at the code of pixel j. Stored as one column
// index per row; the dense form is only built on request.
struct ExtensionMatrix {
  int side = 0;
  std::vector<LbpCode> column_of_row;

  int rows() const noexcept { return static_cast<int>(column_of_row.size()); }
  static constexpr int cols() noexcept { return kCodeCount; }

  std::vector<int> column_sums() const;
  DenseMatrix to_dense() const;
};

ExtensionMatrix build_E(const LbpCodeMap& codes);
ExtensionMatrix build_E(LbpCodeMap&& codes);

// T: l x n^2 indicator of square sub-regions, numbered row-major over the grid.
struct TilingMatrix {
  int side = 0;
  int regions = 0;
  std::vector<int> region_of_pixel;

  int rows() const noexcept { return regions; }
  int cols() const noexcept { return side * side; }
  int grid() const noexcept;         // regions per side
  int region_side() const noexcept;  // pixels per region side
  int region_size() const noexcept { return region_side() * region_side(); }

  DenseMatrix to_dense() const;
};

// Throws ConfigError unless l is a perfect square whose root divides n.
TilingMatrix build_T(int side, int regions);

// H: 256 x m, column i the indicator of codes [i*256/m, (i+1)*256/m).
struct HistogramMatrix {
  int bins = 0;

  static constexpr int rows() noexcept { return kCodeCount; }
  int cols() const noexcept { return bins; }
  int bin_width() const noexcept { return kCodeCount / bins; }
  int bin_of(int code) const noexcept { return code / bin_width(); }

  DenseMatrix to_dense() const;
};

// Throws ConfigError unless m is a power of two in [1, 256].
HistogramMatrix build_H(int bins);

// F = T E H for the indicator matrices, by direct counting. O(n^2).
DenseMatrix compose_F(const TilingMatrix& t, const ExtensionMatrix& e, const HistogramMatrix& h);

// F = T E H for arbitrary dense left (l x n^2) and right (256 x m) transforms,
// using the row sparsity of E. O(l n^2 m).
DenseMatrix compose_F(const DenseMatrix& t, const ExtensionMatrix& e, const DenseMatrix& h);

}  // namespace lbpopt
