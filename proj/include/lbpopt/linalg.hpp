#pragma once

#include <span>
#include <vector>

#include "lbpopt/exec.hpp"

namespace lbpopt {

// Tolerances used by the decompositions; one record so they are tuned together.
struct Tolerances {
  double symmetry = 1e-10;         // relative, for symmetric_eig input
  double jacobi_off_diagonal = 1e-12;  // relative to ||G||_F
  int jacobi_max_sweeps = 100;
  double power_step = 1e-12;       // ||v_{k+1} - v_k|| at convergence
  int power_max_iterations = 10000;
  double zero_norm = 1e-14;        // ||M||_F below this is the zero matrix
  double zero_sigma = 1e-12;       // absolute singular value floor
  // Singular values below rank_relative * sigma_1 are treated as numerically
  // zero. The Gram route squares the condition number, so sigma below about
  // sqrt(eps) * sigma_1 carries no reliable left vector.
  double rank_relative = 1e-6;
};

inline constexpr Tolerances kTolerances{};

// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols, double fill = 0.0);
  DenseMatrix(int rows, int cols, std::vector<double> values);

  static DenseMatrix identity(int n);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator()(int r, int c) const { return values_[static_cast<std::size_t>(r) * cols_ + c]; }
  double& operator()(int r, int c) { return values_[static_cast<std::size_t>(r) * cols_ + c]; }

  std::span<const double> row(int r) const {
    return {values_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)};
  }
  std::span<double> row(int r) {
    return {values_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)};
  }
  std::vector<double> column(int c) const;

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  DenseMatrix transposed() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> values_;
};

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
std::vector<double> multiply(const DenseMatrix& m, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double norm2(std::span<const double> a) noexcept;

// Row partial sums are combined serially, so the parallel result is
// bit-identical to the serial one for any thread count.
double frobenius_norm(const DenseMatrix& m, Exec exec = Exec::parallel);

// M^T M.
DenseMatrix gram(const DenseMatrix& m, Exec exec = Exec::parallel);

namespace reference {
double frobenius_norm(const DenseMatrix& m);
DenseMatrix gram(const DenseMatrix& m);
}  // namespace reference

struct EigenDecomposition {
  std::vector<double> values;  // descending
  DenseMatrix vectors;         // eigenvector i in column i
  int sweeps = 0;
};

// Cyclic Jacobi. Throws DomainError for non-symmetric input and
// NumericalError when the sweep cap is hit.
EigenDecomposition symmetric_eig(const DenseMatrix& g, const Tolerances& tol = kTolerances);

struct SvdTriplet {
  std::vector<double> sigmas;                // descending, >= 0
  std::vector<std::vector<double>> u_cols;   // only for numerically nonzero sigmas
  std::vector<std::vector<double>> v_cols;   // one per sigma
  bool rank_deficient() const noexcept { return u_cols.size() < sigmas.size(); }
};

// Top-k thin SVD through the eigendecomposition of M^T M.
SvdTriplet truncated_svd(const DenseMatrix& m, int k, const Tolerances& tol = kTolerances);

struct SingularPair {
  double sigma = 0.0;
  std::vector<double> v;
  int iterations = 0;
  bool used_fallback = false;
};

// Leading right singular vector by power iteration on M^T M, started from the
// normalized column norms. Falls back to symmetric_eig when the iteration
// stalls or breaks down. Sign: the largest-magnitude component is positive.
SingularPair leading_right_singular(const DenseMatrix& m, const Tolerances& tol = kTolerances);

// Same, given the Gram matrix M^T M directly.
SingularPair leading_right_singular_gram(const DenseMatrix& g, const Tolerances& tol = kTolerances);

// Flips v so that its largest-magnitude entry (first on ties) is positive.
void fix_sign(std::span<double> v) noexcept;

}  // namespace lbpopt
