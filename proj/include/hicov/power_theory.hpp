#pragma once

#include <cmath>
#include <cstddef>
#include <type_traits>
#include <variant>

#include "hicov/data_model.hpp"
#include "hicov/errors.hpp"
#include "hicov/linalg.hpp"
#include "hicov/normal_dist.hpp"

namespace hicov {

namespace detail {

inline void require_ratio(double y) {
  if (!(y > 0.0 && y < 1.0)) throw DomainError("dimension ratio y must lie in (0,1)");
}

inline void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
}

}  // namespace detail

// x - 1 - log(x) for x > 0, accurate near x = 1 where the naive form cancels.
inline double x_minus_one_minus_log(double x) {
  if (!(x > 0.0)) throw DomainError("x - 1 - log x requires x > 0");
  const double t = x - 1.0;
  if (std::abs(t) < 1e-3) {
    // t - log1p(t) = t^2/2 - t^3/3 + t^4/4 - ...
    double term = t * t;
    double sum = 0.0;
    for (int k = 2; k < 12; ++k) {
      sum += ((k % 2 == 0) ? 1.0 : -1.0) * term / k;
      term *= t;
    }
    return sum;
  }
  return t - std::log(x);
}

// d(y) = 1 + (1/y - 1) log(1 - y), the centering of tr(S) - log|S| per dimension.
inline double d_correction(double y) {
  detail::require_ratio(y);
  return 1.0 + (1.0 / y - 1.0) * std::log1p(-y);
}

// sigma^2(y) = -2y - 2 log(1 - y)
inline double null_variance(double y) {
  detail::require_ratio(y);
  return -2.0 * y - 2.0 * std::log1p(-y);
}

// Null centering and scale of p * L_n.
struct NullCalibration {
  double y_n;
  double delta;
  double mu_n;
  double sigma_n;
};

inline NullCalibration null_calibration(std::size_t n, std::size_t p, double delta) {
  if (p < 2) throw InvalidInput("null calibration requires p >= 2");
  if (p >= n) throw InvalidRegime("LRT calibration requires p < n (y_n = p/n in (0,1))");
  const double y = static_cast<double>(p) / static_cast<double>(n);
  const double mu = y * (delta / 2.0 - 1.0) - 1.5 * std::log1p(-y);
  return {y, delta, mu, std::sqrt(null_variance(y))};
}

// L_l(Sigma) = tr(Sigma) - log|Sigma| - p
inline double likelihood_distance(const SymMatrix& sigma) {
  return sigma.trace() - logdet_spd(sigma) - static_cast<double>(sigma.dim());
}

// Closed forms for structured models; explicit matrices go through log-det.
inline double likelihood_distance(const CovarianceModel& cov) {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, IdentityCov>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, DiagonalSpike>) {
          return x_minus_one_minus_log(m.rho);
        } else if constexpr (std::is_same_v<T, RankOneSpike>) {
          return x_minus_one_minus_log(1.0 + m.magnitude());
        } else {
          return likelihood_distance(m.sigma);
        }
      },
      cov.variant());
}

// L_q(Sigma) = tr((Sigma - I)^2), the squared Frobenius norm of Sigma - I.
inline double quadratic_distance(const SymMatrix& sigma) {
  const auto p = static_cast<Eigen::Index>(sigma.dim());
  return (sigma.matrix() - Matrix::Identity(p, p)).squaredNorm();
}

inline double quadratic_distance(const CovarianceModel& cov) {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, IdentityCov>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, DiagonalSpike>) {
          return (m.rho - 1.0) * (m.rho - 1.0);
        } else if constexpr (std::is_same_v<T, RankOneSpike>) {
          const double a = m.magnitude();
          return a * a;
        } else {
          return quadratic_distance(m.sigma);
        }
      },
      cov.variant());
}

// Limiting LRT power 1 - Phi(z_{1-alpha} - b / sigma(y)) when L_l(Sigma) -> b.
inline double lrt_power(double b, double y, double alpha) {
  detail::require_ratio(y);
  detail::require_alpha(alpha);
  if (!(b >= 0.0)) throw DomainError("likelihood distance b must be >= 0");
  return normal_sf(upper_critical_value(alpha) - b / std::sqrt(null_variance(y)));
}

// LRT power under I + h sqrt(y) v v'.
inline double lrt_spiked_power(double h, double y, double alpha) {
  detail::require_ratio(y);
  const double a = h * std::sqrt(y);
  if (!(1.0 + a > 0.0)) throw DomainError("spiked power requires 1 + h*sqrt(y) > 0");
  return lrt_power(x_minus_one_minus_log(1.0 + a), y, alpha);
}

// Power of the quadratic-loss tests (CM, CZZ) under the same spike.
inline double quadratic_spiked_power(double h, double alpha) {
  detail::require_alpha(alpha);
  return normal_sf(upper_critical_value(alpha) - 0.5 * h * h);
}

// Predicted mean of the standardized LRT statistic under Sigma:
// L_l(Sigma) / sigma_n.
inline double alternative_mean_shift(const SymMatrix& sigma, std::size_t n, std::size_t p, double delta) {
  if (sigma.dim() != p) throw InvalidInput("covariance dimension does not match p");
  const NullCalibration cal = null_calibration(n, p, delta);
  return likelihood_distance(sigma) / cal.sigma_n;
}

}  // namespace hicov
