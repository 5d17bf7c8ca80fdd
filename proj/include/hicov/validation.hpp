#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hicov/data_model.hpp"
#include "hicov/harness.hpp"
#include "hicov/power_theory.hpp"
#include "hicov/rng.hpp"
#include "hicov/statistics.hpp"

namespace hicov {

// A measured quantity compared against a bound. `passed` is decided by the
// producer; `margin` is positive when the check holds with room to spare.
struct Check {
  std::string name;
  double measured;
  double bound;
  double margin;
  bool passed;
};

struct ValidationReport {
  std::string suite;
  std::vector<Check> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }
};

// (x-1)^2 <= 2 (x - 1 - log x) on (0,1] and (x-1)^2 <= 2M (x - 1 - log x)
// on (1,M). Reports the violation count per branch.
inline ValidationReport log_inequality_suite(std::size_t samples_per_branch, std::uint64_t seed) {
  ValidationReport report{"lemma1", {}};

  auto run_branch = [&](const std::string& name, std::uint64_t grid, double lo, double hi,
                        double factor) {
    PhiloxStream rng = substream(seed, StreamPurpose::Inequality, grid, 0);
    std::size_t violations = 0;
    double worst_ratio = 0.0;  // max of lhs / rhs
    for (std::size_t i = 0; i < samples_per_branch; ++i) {
      // The first sample of the (0,1] branch is the closed endpoint x = 1.
      const double x = (i == 0 && hi == 1.0) ? 1.0 : lo + (hi - lo) * rng.uniform();
      const double lhs = (x - 1.0) * (x - 1.0);
      const double rhs = factor * x_minus_one_minus_log(x);
      if (lhs > rhs) ++violations;
      if (rhs > 0.0) worst_ratio = std::max(worst_ratio, lhs / rhs);
    }
    report.checks.push_back({name + " violations (worst lhs/rhs " + std::to_string(worst_ratio) + ")",
                             static_cast<double>(violations), 0.0,
                             -static_cast<double>(violations), violations == 0});
  };

  run_branch("x in (0,1]", 0, 0.0, 1.0, 2.0);
  std::uint64_t grid = 1;
  for (double m : {2.0, 10.0, 100.0}) {
    run_branch("x in (1," + std::to_string(static_cast<int>(m)) + ")", grid++, 1.0, m, 2.0 * m);
  }
  return report;
}

// Relative gap |a - b| / max(1, |b|).
inline double relative_gap(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::abs(b));
}

// Efficient T_{2,n} against the literal distinct-index sums over random
// Gaussian datasets for every 4 <= n <= 8, 1 <= p <= 4.
inline ValidationReport czz_oracle_suite(std::size_t datasets_per_shape, std::uint64_t seed,
                                         double tolerance = 1e-9) {
  ValidationReport report{"czz-oracle", {}};
  double worst = 0.0;
  std::size_t total = 0;
  for (std::size_t n = 4; n <= 8; ++n) {
    for (std::size_t p = 1; p <= 4; ++p) {
      const CovarianceRoot root(CovarianceModel::identity(p));
      const Vector mu = Vector::Zero(static_cast<Eigen::Index>(p));
      for (std::size_t rep = 0; rep < datasets_per_shape; ++rep) {
        PhiloxStream rng = substream(seed, StreamPurpose::Oracle, n * 16 + p, rep);
        const DataMatrix x = sample_dataset(root, InnovationLaw::gaussian(), n, mu, rng);
        worst = std::max(worst, relative_gap(czz_statistic(x), czz_statistic_bruteforce(x)));
        ++total;
      }
    }
  }
  report.checks.push_back({"max relative gap over " + std::to_string(total) + " datasets", worst,
                           tolerance, tolerance - worst, worst <= tolerance});
  return report;
}

// Null CLT of the standardized LRT with Gaussian and standardized Gamma(4, 0.5)
// innovations, plus the mis-specified-delta control whose mean must move by
// y * 0.75 / sigma_n.
inline ValidationReport null_clt_suite(std::size_t n, std::size_t p, std::size_t reps,
                                       std::uint64_t seed, unsigned workers = 1) {
  ValidationReport report{"null-clt", {}};
  auto add = [&report](const std::string& label, const NullCltSummary& s) {
    report.checks.push_back({label + " |mean|", std::abs(s.mean), s.mean_tolerance,
                             s.mean_tolerance - std::abs(s.mean), s.mean_ok()});
    report.checks.push_back({label + " |var - 1|", std::abs(s.variance - 1.0),
                             s.variance_tolerance, s.variance_tolerance - std::abs(s.variance - 1.0),
                             s.variance_ok()});
  };
  const InnovationLaw gamma = InnovationLaw::standardized_gamma(4.0, 0.5);
  const auto gauss = validate_null_clt(n, p, InnovationLaw::gaussian(), reps, seed, {}, workers);
  const auto gam = validate_null_clt(n, p, gamma, reps, seed, {}, workers);
  const auto wrong = validate_null_clt(n, p, gamma, reps, seed, 0.0, workers);
  add("gaussian", gauss);
  add("gamma(4,0.5) delta=1.5", gam);

  const NullCalibration cal = null_calibration(n, p, 0.0);
  const double expected_shift = cal.y_n * 0.75 / cal.sigma_n;
  const double shift = wrong.mean - gam.mean;
  // Same datasets, so the shift is deterministic up to rounding.
  report.checks.push_back({"delta mis-specification mean shift", shift, expected_shift,
                           1e-9 - std::abs(shift - expected_shift),
                           std::abs(shift - expected_shift) <= 1e-9});
  return report;
}

// eps_n checks: exactly zero at Sigma = I; variance matches its expansion
// (within 4 MC standard errors) and the (2 + Delta) bound for a diagonal
// alternative with tr((Sigma - I)^2) = 0.4, Gaussian and Gamma innovations.
inline ValidationReport epsilon_suite(std::size_t n, std::size_t p, std::size_t reps,
                                      std::uint64_t seed, unsigned workers = 1) {
  ValidationReport report{"epsilon", {}};
  const auto id = validate_epsilon_bound(CovarianceModel::identity(p), n,
                                         InnovationLaw::gaussian(), reps, seed, workers);
  report.checks.push_back({"identity max |eps| (mean, variance)",
                           std::abs(id.mean) + id.variance, 0.0, -(std::abs(id.mean) + id.variance),
                           id.mean == 0.0 && id.variance == 0.0});

  const std::size_t spiked = std::min<std::size_t>(10, p);
  Matrix sigma = Matrix::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < spiked; ++i) sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.2;
  const CovarianceModel cov = CovarianceModel::explicit_matrix(SymMatrix(sigma));

  auto add = [&report](const std::string& label, const EpsilonSummary& s) {
    report.checks.push_back({label + " |E eps|", std::abs(s.mean), 4.0 * s.mean_stderr,
                             4.0 * s.mean_stderr - std::abs(s.mean), s.mean_ok()});
    report.checks.push_back({label + " |Var eps - exact|", std::abs(s.variance - s.exact_variance),
                             4.0 * s.variance_stderr,
                             4.0 * s.variance_stderr - std::abs(s.variance - s.exact_variance),
                             s.variance_matches()});
    report.checks.push_back({label + " Var eps vs 1.1 * bound", s.variance, 1.1 * s.bound,
                             1.1 * s.bound - s.variance, s.bound_ok()});
  };
  add("gaussian", validate_epsilon_bound(cov, n, InnovationLaw::gaussian(), reps, seed, workers));
  add("gamma(4,0.5)", validate_epsilon_bound(cov, n, InnovationLaw::standardized_gamma(4.0, 0.5),
                                             reps, seed, workers));
  return report;
}

}  // namespace hicov
