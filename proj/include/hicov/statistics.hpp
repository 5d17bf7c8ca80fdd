#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "hicov/errors.hpp"
#include "hicov/linalg.hpp"
#include "hicov/normal_dist.hpp"
#include "hicov/power_theory.hpp"

namespace hicov {

enum class TestKind { Lrt, Cm, Czz };

inline std::string_view test_name(TestKind kind) {
  switch (kind) {
    case TestKind::Lrt:
      return "LRT";
    case TestKind::Cm:
      return "CM";
    case TestKind::Czz:
      return "CZZ";
  }
  return "?";
}

inline std::optional<TestKind> parse_test_kind(std::string_view s) {
  if (s == "lrt" || s == "LRT") return TestKind::Lrt;
  if (s == "cm" || s == "CM") return TestKind::Cm;
  if (s == "czz" || s == "CZZ") return TestKind::Czz;
  return std::nullopt;
}

// Result of one level-alpha test.
//
// `critical_value` is always z_{1-alpha}. `threshold` is on the scale of the
// quantity the decision compares: the standardized statistic for LRT and CZZ,
// the raw T_{1,n} for CM. In every case reject == (standardized > critical_value).
struct TestOutcome {
  TestKind test;
  double raw;
  double standardized;
  double threshold;
  double critical_value;
  bool reject;
  double alpha;
};

namespace detail {

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0,1)");
}

// Lower triangle of the Gram matrix X'X (n x n).
inline Matrix gram_lower(const DataMatrix& x) {
  const auto n = static_cast<Eigen::Index>(x.samples());
  Matrix g = Matrix::Zero(n, n);
  g.selfadjointView<Eigen::Lower>().rankUpdate(x.columns().transpose());
  return g;
}

}  // namespace detail

// L_n = tr(S)/p - log|S|/p - 1 - d(p/n)
inline double lrt_statistic(const SymMatrix& s, std::size_t n, std::size_t p) {
  if (s.dim() != p) throw InvalidInput("S dimension does not match p");
  if (p < 1) throw InvalidInput("p must be >= 1");
  if (p >= n) throw InvalidRegime("LRT requires p < n (y_n = p/n in (0,1))");
  const double pd = static_cast<double>(p);
  const double y = pd / static_cast<double>(n);
  return s.trace() / pd - logdet_spd(s) / pd - 1.0 - d_correction(y);
}

inline TestOutcome lrt_test(const DataMatrix& x, double alpha, double delta) {
  detail::check_alpha(alpha);
  const std::size_t n = x.samples();
  const std::size_t p = x.dim();
  if (p >= n) throw InvalidRegime("LRT requires p < n (y_n = p/n in (0,1))");
  const NullCalibration cal = null_calibration(n, p, delta);
  const double ln = lrt_statistic(sample_covariance(x), n, p);
  const double z = upper_critical_value(alpha);
  const double standardized = (static_cast<double>(p) * ln - cal.mu_n) / cal.sigma_n;
  return {TestKind::Lrt, ln, standardized, z, z, standardized > z, alpha};
}

// T_{1,n} = 2/(n(n-1)) sum_{i<j} [(X_i'X_j)^2 - X_i'X_i - X_j'X_j + p] on
// uncentered data (known zero mean).
inline double cm_statistic(const DataMatrix& x) {
  const auto n = static_cast<Eigen::Index>(x.samples());
  if (n < 2) throw InvalidInput("CM statistic requires n >= 2");
  const double p = static_cast<double>(x.dim());
  const Matrix g = detail::gram_lower(x);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double gjj = g(j, j);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double gij = g(i, j);
      sum += gij * gij - (g(i, i) + gjj) + p;
    }
  }
  return 2.0 * sum / (static_cast<double>(n) * static_cast<double>(n - 1));
}

inline TestOutcome cm_test(const DataMatrix& x, double alpha) {
  detail::check_alpha(alpha);
  const double n = static_cast<double>(x.samples());
  const double p = static_cast<double>(x.dim());
  const double t1 = cm_statistic(x);
  const double scale = 2.0 * std::sqrt(p * (p + 1.0) / (n * (n - 1.0)));
  const double z = upper_critical_value(alpha);
  const double threshold = z * scale;
  return {TestKind::Cm, t1, t1 / scale, threshold, z, t1 > threshold, alpha};
}

// T_{2,n} evaluated literally: every sum over mutually distinct ordered index
// tuples, inner products recomputed per term. O(n^4 p); refuses n > 12.
inline double czz_statistic_bruteforce(const DataMatrix& x) {
  const std::size_t n = x.samples();
  if (n < 4) throw InvalidInput("CZZ statistic requires n >= 4");
  if (n > 12) throw InvalidInput("brute-force CZZ is limited to n <= 12");
  const Matrix& cols = x.columns();
  auto dot = [&cols](std::size_t a, std::size_t b) {
    return cols.col(static_cast<Eigen::Index>(a)).dot(cols.col(static_cast<Eigen::Index>(b)));
  };

  double pairs = 0.0;
  double triples = 0.0;
  double quads = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double ij = dot(i, j);
      pairs += ij * ij;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        triples += ij * dot(j, k);
        for (std::size_t l = 0; l < n; ++l) {
          if (l == i || l == j || l == k) continue;
          quads += ij * dot(k, l);
        }
      }
    }
  }
  const double nd = static_cast<double>(n);
  const double p2 = nd * (nd - 1.0);
  const double p3 = p2 * (nd - 2.0);
  const double p4 = p3 * (nd - 3.0);
  return pairs / p2 - 2.0 * triples / p3 + quads / p4 - 2.0 * sample_covariance(x).trace() +
         static_cast<double>(x.dim());
}

// T_{2,n} in O(n^2 p). With A the Gram matrix with its diagonal removed,
// a_j its row sums and s = sum_j a_j, the distinct-index sums are
//   pairs   = ||A||_F^2
//   triples = sum_j a_j^2 - pairs
//   quads   = s^2 - 4 sum_j a_j^2 + 2 pairs
inline double czz_statistic(const DataMatrix& x) {
  const auto n = static_cast<Eigen::Index>(x.samples());
  if (n < 4) throw InvalidInput("CZZ statistic requires n >= 4");
  const Matrix g = detail::gram_lower(x);

  Vector row_sums = Vector::Zero(n);
  double pairs = 0.0;
  double diag = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    diag += g(j, j);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double a = g(i, j);
      row_sums(i) += a;
      row_sums(j) += a;
      pairs += 2.0 * a * a;
    }
  }
  const double total = row_sums.sum();
  const double sum_sq = row_sums.squaredNorm();
  const double triples = sum_sq - pairs;
  const double quads = total * total - 4.0 * sum_sq + 2.0 * pairs;

  const double nd = static_cast<double>(n);
  const double p2 = nd * (nd - 1.0);
  const double p3 = p2 * (nd - 2.0);
  const double p4 = p3 * (nd - 3.0);
  // tr(S_n) = (sum_i X_i'X_i - (1/n) sum_{i,j} X_i'X_j) / (n - 1)
  const double trace_s = (diag - (diag + total) / nd) / (nd - 1.0);
  return pairs / p2 - 2.0 * triples / p3 + quads / p4 - 2.0 * trace_s +
         static_cast<double>(x.dim());
}

inline TestOutcome czz_test(const DataMatrix& x, double alpha) {
  detail::check_alpha(alpha);
  const double t2 = czz_statistic(x);
  const double standardized =
      static_cast<double>(x.samples()) / (2.0 * static_cast<double>(x.dim())) * t2;
  const double z = upper_critical_value(alpha);
  return {TestKind::Czz, t2, standardized, z, z, standardized > z, alpha};
}

inline TestOutcome run_test(TestKind kind, const DataMatrix& x, double alpha, double delta) {
  switch (kind) {
    case TestKind::Lrt:
      return lrt_test(x, alpha, delta);
    case TestKind::Cm:
      return cm_test(x, alpha);
    case TestKind::Czz:
      return czz_test(x, alpha);
  }
  throw InvalidInput("unknown test kind");
}

}  // namespace hicov
