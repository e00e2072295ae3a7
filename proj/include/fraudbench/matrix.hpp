#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fraudbench/errors.hpp"

namespace fraudbench {

// Dense row-major matrix of finite doubles.
class Matrix {
 public:
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) {
      throw ContractError("Matrix: " + std::to_string(values_.size()) + " values for shape " +
                          std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw ContractError("Matrix: non-finite entry at row " + std::to_string(i / cols_) +
                            ", column " + std::to_string(i % cols_));
      }
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept { return {values_.data() + r * cols_, cols_}; }

  const std::vector<double>& values() const noexcept { return values_; }

  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  // Rows picked by index, in the given order.
  Matrix select_rows(std::span<const std::size_t> idx) const {
    Matrix out(idx.size(), cols_);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      auto src = row(idx[i]);
      std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ContractError("multiply: shape mismatch " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + " * " + std::to_string(b.rows()) + "x" +
                        std::to_string(b.cols()));
  }
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double frobenius_norm(const Matrix& m) noexcept {
  double s = 0.0;
  for (double v : m.values()) s += v * v;
  return std::sqrt(s);
}

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
// Throws NumericalError when the matrix is not numerically positive definite.
class Cholesky {
 public:
  explicit Cholesky(Matrix a) : l_(std::move(a)) {
    const std::size_t n = l_.rows();
    if (l_.cols() != n) throw ContractError("cholesky: matrix is not square");
    for (std::size_t j = 0; j < n; ++j) {
      double d = l_(j, j);
      for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
      if (!(d > 0.0) || !std::isfinite(d)) {
        throw NumericalError("cholesky: matrix of order " + std::to_string(n) +
                             " is not positive definite (pivot " + std::to_string(j) + ")");
      }
      const double piv = std::sqrt(d);
      l_(j, j) = piv;
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = l_(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
        l_(i, j) = s / piv;
      }
      for (std::size_t i = 0; i < j; ++i) l_(i, j) = 0.0;
    }
  }

  std::size_t order() const noexcept { return l_.rows(); }

  // Solves L z = b in place.
  void solve_lower(std::span<double> b) const noexcept {
    for (std::size_t i = 0; i < order(); ++i) {
      double s = b[i];
      for (std::size_t k = 0; k < i; ++k) s -= l_(i, k) * b[k];
      b[i] = s / l_(i, i);
    }
  }

  // Solves A x = b.
  std::vector<double> solve(std::vector<double> b) const {
    solve_lower(b);
    for (std::size_t i = order(); i-- > 0;) {
      double s = b[i];
      for (std::size_t k = i + 1; k < order(); ++k) s -= l_(k, i) * b[k];
      b[i] = s / l_(i, i);
    }
    return b;
  }

  double log_determinant() const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < order(); ++i) s += std::log(l_(i, i));
    return 2.0 * s;
  }

 private:
  Matrix l_;
};

struct SvdResult {
  Matrix u;               // rows x r, orthonormal columns
  std::vector<double> s;  // r = min(rows, cols), non-increasing
  Matrix vt;              // r x cols, orthonormal rows
};

namespace detail {

struct JacobiOptions {
  int max_sweeps = 100;
  double threshold = 1e-12;
};

// One-sided (Hestenes) Jacobi on the columns of a, which must have
// rows >= cols. On return the columns of a are mutually orthogonal and
// v holds the accumulated rotations.
inline void one_sided_jacobi(Matrix& a, Matrix& v, const JacobiOptions& opt) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  v = Matrix::identity(n);
  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          const double ap = a(i, p), aq = a(i, q);
          alpha += ap * ap;
          beta += aq * aq;
          gamma += ap * aq;
        }
        if (gamma == 0.0 || std::abs(gamma) <= opt.threshold * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double ap = a(i, p), aq = a(i, q);
          a(i, p) = c * ap - s * aq;
          a(i, q) = s * ap + c * aq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) return;
  }
  throw NumericalError("svd: one-sided Jacobi did not converge within " +
                       std::to_string(opt.max_sweeps) + " sweeps for a " + std::to_string(m) + "x" +
                       std::to_string(n) + " matrix");
}

// Replaces column j of q with a unit vector orthogonal to columns [0, j).
inline void complete_column(Matrix& q, std::size_t j) {
  const std::size_t m = q.rows();
  for (std::size_t e = 0; e < m; ++e) {
    std::vector<double> cand(m, 0.0);
    cand[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        double proj = 0.0;
        for (std::size_t i = 0; i < m; ++i) proj += q(i, k) * cand[i];
        for (std::size_t i = 0; i < m; ++i) cand[i] -= proj * q(i, k);
      }
    }
    double norm = 0.0;
    for (double x : cand) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.5) {
      for (std::size_t i = 0; i < m; ++i) q(i, j) = cand[i] / norm;
      return;
    }
  }
}

// Thin SVD of a tall (rows >= cols) matrix.
inline SvdResult svd_tall(const Matrix& input) {
  const std::size_t m = input.rows();
  const std::size_t n = input.cols();
  Matrix a = input;
  Matrix v;
  one_sided_jacobi(a, v, JacobiOptions{});

  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += a(i, j) * a(i, j);
    norms[j] = std::sqrt(s);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  const double smax = n > 0 ? norms[order[0]] : 0.0;
  const double cutoff = smax * static_cast<double>(m) * 1e-15;

  SvdResult r{Matrix(m, n), std::vector<double>(n), Matrix(n, n)};
  std::vector<bool> needs_completion(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    const double sigma = norms[src];
    r.s[j] = sigma;
    if (sigma > cutoff && sigma > 0.0) {
      for (std::size_t i = 0; i < m; ++i) r.u(i, j) = a(i, src) / sigma;
    } else {
      needs_completion[j] = true;
    }
    for (std::size_t i = 0; i < n; ++i) r.vt(j, i) = v(i, src);
  }
  for (std::size_t j = 0; j < n; ++j)
    if (needs_completion[j]) complete_column(r.u, j);

  // Largest-magnitude entry of each right singular vector is made positive,
  // ties going to the lowest index.
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(r.vt(j, i)) > std::abs(r.vt(j, best))) best = i;
    if (r.vt(j, best) < 0.0) {
      for (std::size_t i = 0; i < n; ++i) r.vt(j, i) = -r.vt(j, i);
      for (std::size_t i = 0; i < m; ++i) r.u(i, j) = -r.u(i, j);
    }
  }
  return r;
}

}  // namespace detail

// Thin singular value decomposition M = U diag(S) V^T.
inline SvdResult svd(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) throw ContractError("svd: empty matrix");
  if (m.rows() >= m.cols()) return detail::svd_tall(m);

  // Wide input: decompose the transpose and swap factors, then reapply the
  // sign convention to the (new) right singular vectors.
  SvdResult t = detail::svd_tall(m.transpose());
  SvdResult r{t.vt.transpose(), std::move(t.s), t.u.transpose()};
  for (std::size_t j = 0; j < r.vt.rows(); ++j) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < r.vt.cols(); ++i)
      if (std::abs(r.vt(j, i)) > std::abs(r.vt(j, best))) best = i;
    if (r.vt(j, best) < 0.0) {
      for (std::size_t i = 0; i < r.vt.cols(); ++i) r.vt(j, i) = -r.vt(j, i);
      for (std::size_t i = 0; i < r.u.rows(); ++i) r.u(i, j) = -r.u(i, j);
    }
  }
  return r;
}

inline Matrix reconstruct(const SvdResult& r) {
  Matrix us = r.u;
  for (std::size_t i = 0; i < us.rows(); ++i)
    for (std::size_t j = 0; j < us.cols(); ++j) us(i, j) *= r.s[j];
  return multiply(us, r.vt);
}

}  // namespace fraudbench
