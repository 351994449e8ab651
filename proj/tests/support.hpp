#pragma once

// Independent oracles and generators shared by the test binaries. Nothing here
// calls into the kernels it is used to check.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "lbpopt/lbp.hpp"
#include "lbpopt/linalg.hpp"
#include "lbpopt/rng.hpp"

namespace lbpopt::testing {

inline GrayImage random_image(int side, Rng& rng) {
  std::vector<std::uint8_t> px(static_cast<std::size_t>(side) * side);
  for (auto& p : px) p = static_cast<std::uint8_t>(uniform_below(rng, 256));
  return GrayImage(side, std::move(px));
}

// Few distinct levels so ties are frequent.
inline GrayImage random_coarse_image(int side, Rng& rng, int levels = 3) {
  std::vector<std::uint8_t> px(static_cast<std::size_t>(side) * side);
  for (auto& p : px) p = static_cast<std::uint8_t>(40 * uniform_below(rng, static_cast<std::uint64_t>(levels)));
  return GrayImage(side, std::move(px));
}

inline DenseMatrix random_matrix(int rows, int cols, Rng& rng) {
  DenseMatrix m(rows, cols);
  for (double& x : m.values()) x = standard_normal(rng);
  return m;
}

inline std::vector<double> random_unit(int n, Rng& rng) {
  std::vector<double> v(n);
  double s = 0.0;
  for (double& x : v) {
    x = standard_normal(rng);
    s += x * x;
  }
  s = std::sqrt(s);
  for (double& x : v) x /= s;
  return v;
}

// k orthonormal vectors of length n by modified Gram-Schmidt.
inline std::vector<std::vector<double>> random_orthonormal(int n, int k, Rng& rng) {
  std::vector<std::vector<double>> q;
  while (static_cast<int>(q.size()) < k) {
    std::vector<double> v = random_unit(n, rng);
    for (const auto& u : q) {
      double d = 0.0;
      for (int i = 0; i < n; ++i) d += u[i] * v[i];
      for (int i = 0; i < n; ++i) v[i] -= d * u[i];
    }
    double s = 0.0;
    for (double x : v) s += x * x;
    s = std::sqrt(s);
    if (s < 1e-8) continue;
    for (double& x : v) x /= s;
    q.push_back(std::move(v));
  }
  return q;
}

// LBP by explicitly building the zero-padded (n+2)^2 grid and evaluating the
// threshold sum literally.
inline std::vector<int> padded_lbp_oracle(const GrayImage& img) {
  const int n = img.side();
  const int p = n + 2;
  std::vector<int> pad(static_cast<std::size_t>(p) * p, 0);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) pad[(r + 1) * p + (c + 1)] = img(r, c);
  // top-left, top, top-right, right, bottom-right, bottom, bottom-left, left
  const int dr[8] = {-1, -1, -1, 0, 1, 1, 1, 0};
  const int dc[8] = {-1, 0, 1, 1, 1, 0, -1, -1};
  std::vector<int> out(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const int center = pad[(r + 1) * p + (c + 1)];
      int code = 0;
      for (int i = 0; i < 8; ++i) {
        const int v = pad[(r + 1 + dr[i]) * p + (c + 1 + dc[i])];
        if (v >= center) code += 1 << i;
      }
      out[r * n + c] = code;
    }
  return out;
}

inline int naive_transitions(int code) {
  int t = 0;
  for (int i = 0; i < 8; ++i) {
    const int a = (code >> i) & 1;
    const int b = (code >> ((i + 1) % 8)) & 1;
    t += a != b;
  }
  return t;
}

// Per-region m-bin histograms by scanning each square region directly.
inline std::vector<std::vector<int>> region_histogram_oracle(const std::vector<int>& codes, int n, int l, int m) {
  int g = 0;
  while (g * g < l) ++g;
  const int s = n / g;
  const int width = 256 / m;
  std::vector<std::vector<int>> f(l, std::vector<int>(m, 0));
  for (int gr = 0; gr < g; ++gr)
    for (int gc = 0; gc < g; ++gc)
      for (int r = gr * s; r < (gr + 1) * s; ++r)
        for (int c = gc * s; c < (gc + 1) * s; ++c) ++f[gr * g + gc][codes[r * n + c] / width];
  return f;
}

inline DenseMatrix naive_multiply(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (int k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

inline DenseMatrix naive_transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline double naive_frobenius(const DenseMatrix& a) {
  long double s = 0.0L;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) s += static_cast<long double>(a(i, j)) * a(i, j);
  return static_cast<double>(std::sqrt(s));
}

// Dense one-hot E from a code list.
inline DenseMatrix dense_E_oracle(const std::vector<int>& codes) {
  DenseMatrix e(static_cast<int>(codes.size()), 256);
  for (std::size_t j = 0; j < codes.size(); ++j) e(static_cast<int>(j), codes[j]) = 1.0;
  return e;
}

// A difference of two random row-stochastic matrices (rows x 256), the shape
// and value range of a class-mean difference.
inline DenseMatrix random_difference(int rows, Rng& rng, int support = 12) {
  DenseMatrix d(rows, 256);
  for (int sign : {1, -1}) {
    for (int r = 0; r < rows; ++r) {
      std::vector<double> w(support);
      double s = 0.0;
      for (double& x : w) {
        x = uniform_unit(rng) + 1e-3;
        s += x;
      }
      for (int k = 0; k < support; ++k) {
        const int c = static_cast<int>(uniform_below(rng, 256));
        d(r, c) += sign * w[k] / s;
      }
    }
  }
  return d;
}

}  // namespace lbpopt::testing
