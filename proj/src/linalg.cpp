#include "lbpopt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "lbpopt/error.hpp"

namespace lbpopt {

DenseMatrix::DenseMatrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw ShapeError("matrix dimensions must be nonnegative");
  values_.assign(static_cast<std::size_t>(rows) * cols, fill);
}

DenseMatrix::DenseMatrix(int rows, int cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows < 0 || cols < 0) throw ShapeError("matrix dimensions must be nonnegative");
  if (values_.size() != static_cast<std::size_t>(rows) * cols) {
    throw ShapeError("matrix value count " + std::to_string(values_.size()) + " does not match " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
}

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> DenseMatrix::column(int c) const {
  std::vector<double> out(rows_);
  for (int r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("cannot multiply " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " by " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  DenseMatrix out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    auto dst = out.row(i);
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const auto src = b.row(k);
      for (int j = 0; j < b.cols(); ++j) dst[j] += aik * src[j];
    }
  }
  return out;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError("matrix difference shape mismatch");
  DenseMatrix out = a;
  auto dst = out.values();
  const auto src = b.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= src[i];
  return out;
}

std::vector<double> multiply(const DenseMatrix& m, std::span<const double> x) {
  if (static_cast<std::size_t>(m.cols()) != x.size()) throw ShapeError("matrix-vector shape mismatch");
  std::vector<double> y(m.rows());
  for (int r = 0; r < m.rows(); ++r) y[r] = dot(m.row(r), x);
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) noexcept { return std::sqrt(dot(a, a)); }

namespace {

double row_square_sum(std::span<const double> row) noexcept {
  double s = 0.0;
  for (double x : row) s += x * x;
  return s;
}

// Accumulates the upper triangle rows [i0, i1) of M^T M, summing over the
// rows of M in ascending order.
void gram_rows(const DenseMatrix& m, DenseMatrix& g, int i0, int i1) {
  const int cols = m.cols();
  for (int r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (int i = i0; i < i1; ++i) {
      const double mi = row[i];
      if (mi == 0.0) continue;
      auto gi = g.row(i);
      for (int j = i; j < cols; ++j) gi[j] += mi * row[j];
    }
  }
}

void mirror_upper(DenseMatrix& g) {
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < i; ++j) g(i, j) = g(j, i);
}

constexpr int kGramBlock = 16;

}  // namespace

namespace reference {

double frobenius_norm(const DenseMatrix& m) {
  double total = 0.0;
  for (int r = 0; r < m.rows(); ++r) total += row_square_sum(m.row(r));
  return std::sqrt(total);
}

DenseMatrix gram(const DenseMatrix& m) {
  DenseMatrix g(m.cols(), m.cols());
  gram_rows(m, g, 0, m.cols());
  mirror_upper(g);
  return g;
}

}  // namespace reference

double frobenius_norm(const DenseMatrix& m, Exec exec) {
  if (exec == Exec::serial) return reference::frobenius_norm(m);
  std::vector<double> partial(m.rows());
#pragma omp parallel for schedule(static)
  for (int r = 0; r < m.rows(); ++r) partial[r] = row_square_sum(m.row(r));
  double total = 0.0;
  for (double p : partial) total += p;
  return std::sqrt(total);
}

DenseMatrix gram(const DenseMatrix& m, Exec exec) {
  if (exec == Exec::serial) return reference::gram(m);
  const int cols = m.cols();
  DenseMatrix g(cols, cols);
  const int blocks = (cols + kGramBlock - 1) / kGramBlock;
#pragma omp parallel for schedule(dynamic, 1)
  for (int b = 0; b < blocks; ++b) {
    gram_rows(m, g, b * kGramBlock, std::min(cols, (b + 1) * kGramBlock));
  }
  mirror_upper(g);
  return g;
}

void fix_sign(std::span<double> v) noexcept {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  if (!v.empty() && v[best] < 0.0) {
    for (double& x : v) x = -x;
  }
}

namespace {

double max_off_diagonal(const DenseMatrix& a) {
  double off = 0.0;
  for (int p = 0; p < a.rows(); ++p)
    for (int q = p + 1; q < a.cols(); ++q) off = std::max(off, std::abs(a(p, q)));
  return off;
}

double off_diagonal_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (int p = 0; p < a.rows(); ++p)
    for (int q = 0; q < a.cols(); ++q)
      if (p != q) s += a(p, q) * a(p, q);
  return std::sqrt(s);
}

// One Jacobi rotation zeroing a(p, q); accumulates into vt, which holds
// eigenvectors as rows so both updated vectors are contiguous.
void rotate(DenseMatrix& a, DenseMatrix& vt, int p, int q) {
  const double apq = a(p, q);
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const int n = a.rows();

  auto row_p = a.row(p);
  auto row_q = a.row(q);
  for (int k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    const double akp = row_p[k];
    const double akq = row_q[k];
    row_p[k] = c * akp - s * akq;
    row_q[k] = s * akp + c * akq;
  }
  a(p, p) -= t * apq;
  a(q, q) += t * apq;
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (int k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    a(k, p) = row_p[k];
    a(k, q) = row_q[k];
  }

  auto vp = vt.row(p);
  auto vq = vt.row(q);
  for (int k = 0; k < n; ++k) {
    const double x = vp[k];
    const double y = vq[k];
    vp[k] = c * x - s * y;
    vq[k] = s * x + c * y;
  }
}

}  // namespace

EigenDecomposition symmetric_eig(const DenseMatrix& g, const Tolerances& tol) {
  if (g.rows() != g.cols()) throw ShapeError("symmetric_eig needs a square matrix");
  const int n = g.rows();
  const double scale = reference::frobenius_norm(g);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(g(i, j) - g(j, i)) > tol.symmetry * std::max(scale, 1e-300)) {
        throw DomainError("symmetric_eig input is not symmetric at (" + std::to_string(i) + ", " +
                          std::to_string(j) + ")");
      }
    }
  }

  DenseMatrix a = g;
  // Work on the exactly symmetrized input.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = avg;
      a(j, i) = avg;
    }
  DenseMatrix vt = DenseMatrix::identity(n);
  const double target = tol.jacobi_off_diagonal * scale;

  int sweeps = 0;
  while (max_off_diagonal(a) > target) {
    if (sweeps == tol.jacobi_max_sweeps) {
      std::ostringstream msg;
      msg << "Jacobi eigensolver did not converge in " << sweeps
          << " sweeps; off-diagonal norm " << off_diagonal_norm(a);
      throw NumericalError(msg.str());
    }
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q)
        // Entries already below target need no rotation.
        if (std::abs(a(p, q)) > target) rotate(a, vt, p, q);
    ++sweeps;
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) > a(y, y); });

  EigenDecomposition out;
  out.sweeps = sweeps;
  out.values.resize(n);
  out.vectors = DenseMatrix(n, n);
  std::vector<double> column(n);
  for (int i = 0; i < n; ++i) {
    out.values[i] = a(order[i], order[i]);
    for (int k = 0; k < n; ++k) column[k] = vt(order[i], k);
    fix_sign(column);
    for (int k = 0; k < n; ++k) out.vectors(k, i) = column[k];
  }
  return out;
}

SvdTriplet truncated_svd(const DenseMatrix& m, int k, const Tolerances& tol) {
  if (k < 1 || k > m.cols()) {
    throw DomainError("truncated_svd rank " + std::to_string(k) + " outside [1, " +
                      std::to_string(m.cols()) + "]");
  }
  const EigenDecomposition eig = symmetric_eig(gram(m), tol);
  SvdTriplet out;
  const double sigma1 = std::sqrt(std::max(eig.values[0], 0.0));
  const double cutoff = std::max(tol.zero_sigma, tol.rank_relative * sigma1);
  for (int i = 0; i < k; ++i) {
    const double sigma = std::sqrt(std::max(eig.values[i], 0.0));
    std::vector<double> v = eig.vectors.column(i);
    if (sigma > cutoff && out.u_cols.size() == static_cast<std::size_t>(i)) {
      std::vector<double> u = multiply(m, v);
      for (double& x : u) x /= sigma;
      out.u_cols.push_back(std::move(u));
    }
    out.sigmas.push_back(sigma);
    out.v_cols.push_back(std::move(v));
  }
  return out;
}

SingularPair leading_right_singular(const DenseMatrix& m, const Tolerances& tol) {
  if (reference::frobenius_norm(m) <= tol.zero_norm) {
    throw DegenerateInputError("leading singular vector of a zero matrix is undefined");
  }
  return leading_right_singular_gram(gram(m), tol);
}

namespace {

SingularPair leading_by_eig(const DenseMatrix& g, const Tolerances& tol, int iterations) {
  const EigenDecomposition eig = symmetric_eig(g, tol);
  SingularPair out;
  out.sigma = std::sqrt(std::max(eig.values[0], 0.0));
  out.v = eig.vectors.column(0);
  out.iterations = iterations;
  out.used_fallback = true;
  return out;
}

}  // namespace

constexpr int kStallWindow = 64;

SingularPair leading_right_singular_gram(const DenseMatrix& g, const Tolerances& tol) {
  if (g.rows() != g.cols()) throw ShapeError("Gram matrix must be square");
  const int n = g.rows();
  double trace = 0.0;
  double max_diag = 0.0;
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    const double d = std::max(g(i, i), 0.0);
    trace += d;
    max_diag = std::max(max_diag, d);
    v[i] = std::sqrt(d);
  }
  if (std::sqrt(trace) <= tol.zero_norm) {
    throw DegenerateInputError("leading singular vector of a zero matrix is undefined");
  }
  const double start_norm = norm2(v);
  for (double& x : v) x /= start_norm;

  std::vector<double> w(n);
  int it = 0;
  bool converged = false;
  double previous_step = 0.0;
  while (it < tol.power_max_iterations) {
    ++it;
    for (int i = 0; i < n; ++i) w[i] = dot(g.row(i), v);
    const double nw = norm2(w);
    // The start vector is orthogonal to the range of G.
    if (nw <= 1e-12 * trace) break;
    double step = 0.0;
    for (int i = 0; i < n; ++i) {
      w[i] /= nw;
      step += (w[i] - v[i]) * (w[i] - v[i]);
    }
    step = std::sqrt(step);
    v.swap(w);
    if (step <= tol.power_step) {
      converged = true;
      break;
    }
    // Steps shrink by about lambda_2 / lambda_1 per iteration; stop early when
    // that rate cannot reach the tolerance within the iteration budget.
    if (it % kStallWindow == 0) {
      if (previous_step > 0.0) {
        const double rate = std::pow(step / previous_step, 1.0 / kStallWindow);
        const double needed = rate < 1.0 ? std::log(tol.power_step / step) / std::log(rate) : INFINITY;
        if (it + needed > tol.power_max_iterations) break;
      }
      previous_step = step;
    }
  }
  if (!converged) return leading_by_eig(g, tol, it);

  for (int i = 0; i < n; ++i) w[i] = dot(g.row(i), v);
  const double lambda = dot(v, w);
  // lambda_max >= max_i G_ii; a converged iterate below that bound is stuck in
  // a lower eigenspace because the start vector cancelled the top one.
  if (lambda < max_diag * (1.0 - 1e-12)) return leading_by_eig(g, tol, it);

  fix_sign(v);
  SingularPair out;
  out.sigma = std::sqrt(std::max(lambda, 0.0));
  out.v = std::move(v);
  out.iterations = it;
  return out;
}

}  // namespace lbpopt
