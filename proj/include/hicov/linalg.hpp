#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>

#include <Eigen/Dense>

#include "hicov/errors.hpp"

namespace hicov {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dense symmetric matrix. The constructor symmetrizes its argument as
// (M + M')/2, so entries(i,j) == entries(j,i) holds bit for bit.
class SymMatrix {
 public:
  explicit SymMatrix(const Matrix& m) {
    if (m.rows() < 1 || m.rows() != m.cols()) {
      throw InvalidInput("SymMatrix requires a non-empty square matrix");
    }
    m_ = 0.5 * (m + m.transpose());
  }

  static SymMatrix identity(std::size_t p) {
    return SymMatrix(Matrix::Identity(static_cast<Eigen::Index>(p),
                                      static_cast<Eigen::Index>(p)));
  }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }

  // Largest absolute entry.
  double max_abs() const { return m_.cwiseAbs().maxCoeff(); }
  // Matrix infinity norm (largest absolute row sum).
  double inf_norm() const { return m_.cwiseAbs().rowwise().sum().maxCoeff(); }

 private:
  Matrix m_;
};

// p x n data matrix holding the observations X_1..X_n as columns.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix columns) : x_(std::move(columns)) {
    if (x_.rows() < 1) throw InvalidInput("DataMatrix requires p >= 1");
    if (x_.cols() < 2) throw InvalidInput("DataMatrix requires n >= 2 observations");
  }

  // Builds from an n x p array with one observation per row.
  static DataMatrix from_rows(const Matrix& rows) { return DataMatrix(rows.transpose()); }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(x_.rows()); }
  std::size_t samples() const noexcept { return static_cast<std::size_t>(x_.cols()); }
  const Matrix& columns() const noexcept { return x_; }
  auto observation(Eigen::Index k) const { return x_.col(k); }

 private:
  Matrix x_;
};

// Unbiased sample covariance S_n = (1/(n-1)) sum_k (X_k - Xbar)(X_k - Xbar)'.
inline SymMatrix sample_covariance(const DataMatrix& x) {
  const auto n = static_cast<Eigen::Index>(x.samples());
  if (n < 2) throw InvalidInput("sample_covariance requires n >= 2");
  const Vector mean = x.columns().rowwise().mean();
  const Matrix centered = x.columns().colwise() - mean;
  const auto p = centered.rows();
  Matrix s = Matrix::Zero(p, p);
  s.selfadjointView<Eigen::Lower>().rankUpdate(centered, 1.0 / static_cast<double>(n - 1));
  s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
  return SymMatrix(s);
}

// Pivot threshold below which a Cholesky pivot is declared non-positive.
inline double cholesky_pivot_tolerance(const SymMatrix& m) {
  const auto d = static_cast<double>(m.dim());
  return d * d * std::numeric_limits<double>::epsilon() * m.max_abs();
}

// log|M| from the Cholesky factor, sum of 2*log(L_jj). Throws
// NotPositiveDefinite carrying the first failing pivot index.
inline double logdet_spd(const SymMatrix& m) {
  const auto p = static_cast<Eigen::Index>(m.dim());
  const double tol = cholesky_pivot_tolerance(m);
  Matrix l = m.matrix();
  double logdet = 0.0;
  for (Eigen::Index j = 0; j < p; ++j) {
    double pivot = l(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > tol)) throw NotPositiveDefinite(static_cast<std::size_t>(j), pivot);
    pivot = std::sqrt(pivot);
    l(j, j) = pivot;
    logdet += 2.0 * std::log(pivot);
    const Eigen::Index rest = p - j - 1;
    if (rest > 0) {
      l.col(j).tail(rest).noalias() -=
          l.bottomLeftCorner(rest, j) * l.row(j).head(j).transpose();
      l.col(j).tail(rest) /= pivot;
    }
  }
  return logdet;
}

// Symmetric PSD square root via eigendecomposition. Eigenvalues in
// [-1e-8 * ||M||_inf, 0) are clipped to zero; anything lower throws NotPsd.
inline SymMatrix sqrt_psd(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m.matrix());
  if (eig.info() != Eigen::Success) throw NotPsd(std::numeric_limits<double>::quiet_NaN());
  const Vector& values = eig.eigenvalues();
  const double floor = -1e-8 * m.inf_norm();
  if (values.minCoeff() < floor) throw NotPsd(values.minCoeff());
  const Vector roots = values.cwiseMax(0.0).cwiseSqrt();
  const Matrix& v = eig.eigenvectors();
  return SymMatrix(v * roots.asDiagonal() * v.transpose());
}

}  // namespace hicov
