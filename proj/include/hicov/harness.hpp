#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hicov/data_model.hpp"
#include "hicov/errors.hpp"
#include "hicov/linalg.hpp"
#include "hicov/normal_dist.hpp"
#include "hicov/power_theory.hpp"
#include "hicov/rng.hpp"
#include "hicov/statistics.hpp"

namespace hicov {

// Runs fn(i) for i in [0, count) on up to `workers` threads (0 = hardware
// concurrency). Work is split into contiguous chunks; results must be written
// to per-index slots so the outcome does not depend on the worker count.
// The exception from the lowest failing chunk is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t chunks = std::min<std::size_t>(workers, std::max<std::size_t>(count, 1));
  if (chunks <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(chunks);
  std::vector<std::thread> threads;
  threads.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = count * c / chunks;
    const std::size_t end = count * (c + 1) / chunks;
    threads.emplace_back([&fn, &errors, c, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

enum class MeanMode { Zero, RandomFixed };

// One Monte Carlo campaign: every grid model is simulated `reps` times and
// each replication's dataset is fed to all selected tests.
struct SimulationConfig {
  std::size_t n = 200;
  std::size_t p = 50;
  double alpha = 0.05;
  std::size_t reps = 10000;
  InnovationLaw law = InnovationLaw::gaussian();
  MeanMode mean_mode = MeanMode::Zero;
  std::vector<TestKind> tests;
  std::vector<CovarianceModel> grid;
  std::uint64_t seed = 0;
  unsigned workers = 1;

  void validate() const {
    if (reps < 100) throw InvalidInput("reps must be >= 100");
    if (n < 4) throw InvalidInput("n must be >= 4");
    if (p < 2) throw InvalidInput("p must be >= 2");
    if (p >= n) throw InvalidRegime("campaigns require p < n (y = p/n in (0,1))");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0,1)");
    if (tests.empty()) throw InvalidInput("at least one test must be selected");
    for (std::size_t i = 0; i < tests.size(); ++i) {
      for (std::size_t j = i + 1; j < tests.size(); ++j) {
        if (tests[i] == tests[j]) throw InvalidInput("duplicate test in selection");
      }
    }
    const bool has_cm = std::find(tests.begin(), tests.end(), TestKind::Cm) != tests.end();
    if (has_cm && (mean_mode != MeanMode::Zero ||
                   law.kind() != InnovationLaw::Kind::Gaussian)) {
      throw InvalidInput("the CM test is only valid for zero-mean Gaussian data");
    }
    if (grid.empty()) throw InvalidInput("grid must contain at least one covariance model");
    for (const auto& m : grid) {
      if (m.dim() != p) throw InvalidInput("grid model dimension does not match p");
    }
  }
};

// Replications whose sample covariance failed the Cholesky check.
class SingularSample : public NotPositiveDefinite {
 public:
  SingularSample(std::size_t grid_index, std::size_t first_rep, std::size_t count)
      : NotPositiveDefinite("singular sample covariance in " + std::to_string(count) +
                            " replication(s); first at grid point " +
                            std::to_string(grid_index) + ", replication " +
                            std::to_string(first_rep)),
        count_(count) {}
  std::size_t count() const noexcept { return count_; }

 private:
  std::size_t count_;
};

struct TestRate {
  TestKind test;
  std::size_t rejections;
  double rate;
  double mc_stderr;
  std::optional<double> theory;
};

struct CurvePoint {
  CovarianceModel model;
  std::optional<double> grid_param;
  double likelihood_distance;
  std::vector<TestRate> rates;

  const TestRate* find(TestKind kind) const {
    for (const auto& r : rates) {
      if (r.test == kind) return &r;
    }
    return nullptr;
  }
};

struct PowerCurve {
  SimulationConfig config;
  std::vector<CurvePoint> points;
};

// Mean vector used by every replication of a campaign.
inline Vector campaign_mean(const SimulationConfig& cfg) {
  const auto p = static_cast<Eigen::Index>(cfg.p);
  if (cfg.mean_mode == MeanMode::Zero) return Vector::Zero(p);
  PhiloxStream rng = substream(cfg.seed, StreamPurpose::Mean, 0, 0);
  Vector mu(p);
  for (Eigen::Index i = 0; i < p; ++i) mu(i) = normal_quantile_fast(rng.uniform());
  return mu;
}

// Theoretical power of `kind` at `model`, where a closed form exists.
inline std::optional<double> theoretical_power(TestKind kind, const CovarianceModel& model,
                                               std::size_t n, std::size_t p, double alpha) {
  if (kind == TestKind::Lrt) {
    const double y = static_cast<double>(p) / static_cast<double>(n);
    return lrt_power(likelihood_distance(model), y, alpha);
  }
  if (const auto* spike = std::get_if<RankOneSpike>(&model.variant())) {
    return quadratic_spiked_power(spike->h, alpha);
  }
  if (model.is_identity()) return alpha;
  return std::nullopt;
}

// Outcomes of all selected tests for every replication at one grid point,
// laid out as [rep * tests.size() + test].
inline std::vector<TestOutcome> simulate_grid_point(const SimulationConfig& cfg,
                                                    std::size_t grid_index, const Vector& mu,
                                                    double delta) {
  const CovarianceRoot root(cfg.grid.at(grid_index));
  const std::size_t nt = cfg.tests.size();
  std::vector<TestOutcome> out(cfg.reps * nt);
  std::vector<std::uint8_t> singular(cfg.reps, 0);
  parallel_for(cfg.reps, cfg.workers, [&](std::size_t rep) {
    PhiloxStream rng = substream(cfg.seed, StreamPurpose::Dataset, grid_index, rep);
    const DataMatrix x = sample_dataset(root, cfg.law, cfg.n, mu, rng);
    for (std::size_t t = 0; t < nt; ++t) {
      try {
        out[rep * nt + t] = run_test(cfg.tests[t], x, cfg.alpha, delta);
      } catch (const NotPositiveDefinite&) {
        singular[rep] = 1;
      }
    }
  });
  const auto bad = static_cast<std::size_t>(std::count(singular.begin(), singular.end(), 1));
  if (bad > 0) {
    const auto first = static_cast<std::size_t>(
        std::find(singular.begin(), singular.end(), 1) - singular.begin());
    throw SingularSample(grid_index, first, bad);
  }
  return out;
}

inline PowerCurve run_campaign(const SimulationConfig& cfg) {
  cfg.validate();
  const Vector mu = campaign_mean(cfg);
  const double delta = delta_of(cfg.law);
  const std::size_t nt = cfg.tests.size();
  const double reps = static_cast<double>(cfg.reps);

  PowerCurve curve{cfg, {}};
  for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
    const auto outcomes = simulate_grid_point(cfg, g, mu, delta);
    const CovarianceModel& model = cfg.grid[g];
    CurvePoint point{model, model.grid_parameter(), likelihood_distance(model), {}};
    for (std::size_t t = 0; t < nt; ++t) {
      std::size_t rejections = 0;
      for (std::size_t r = 0; r < cfg.reps; ++r) rejections += outcomes[r * nt + t].reject ? 1 : 0;
      const double rate = static_cast<double>(rejections) / reps;
      point.rates.push_back({cfg.tests[t], rejections, rate, std::sqrt(rate * (1.0 - rate) / reps),
                             theoretical_power(cfg.tests[t], model, cfg.n, cfg.p, cfg.alpha)});
    }
    curve.points.push_back(std::move(point));
  }
  return curve;
}

struct TheoryGap {
  std::optional<double> grid_param;
  double likelihood_distance;
  double empirical;
  double mc_stderr;
  double prediction;
  double gap;  // empirical - prediction
};

// Empirical LRT power against 1 - Phi(z_{1-alpha} - L_l(Sigma)/sigma_n).
inline std::vector<TheoryGap> power_vs_theory(const SimulationConfig& cfg) {
  if (std::find(cfg.tests.begin(), cfg.tests.end(), TestKind::Lrt) == cfg.tests.end()) {
    throw InvalidInput("power_vs_theory requires the LRT in the test selection");
  }
  const PowerCurve curve = run_campaign(cfg);
  std::vector<TheoryGap> rows;
  for (const auto& point : curve.points) {
    const TestRate* lrt = point.find(TestKind::Lrt);
    const double prediction = *lrt->theory;
    rows.push_back({point.grid_param, point.likelihood_distance, lrt->rate, lrt->mc_stderr,
                    prediction, lrt->rate - prediction});
  }
  return rows;
}

// Mean and unbiased variance.
inline std::pair<double, double> mean_variance(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, v.size() > 1 ? ss / (n - 1.0) : 0.0};
}

// One-sample Kolmogorov-Smirnov distance to N(0,1).
inline double ks_distance_normal(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = normal_cdf(v[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

struct NullCltSummary {
  std::size_t reps;
  double delta_used;
  double mean;
  double variance;
  double ks_distance;
  double mean_tolerance;      // 4 / sqrt(reps)
  double variance_tolerance;  // 4 * sqrt(2 / reps)

  bool mean_ok() const { return std::abs(mean) <= mean_tolerance; }
  bool variance_ok() const { return std::abs(variance - 1.0) <= variance_tolerance; }
};

// Standardized LRT statistic under Sigma = I. `delta` overrides the law's
// true excess kurtosis (for mis-specification controls).
inline NullCltSummary validate_null_clt(std::size_t n, std::size_t p, const InnovationLaw& law,
                                        std::size_t reps, std::uint64_t seed,
                                        std::optional<double> delta = std::nullopt,
                                        unsigned workers = 1) {
  SimulationConfig cfg;
  cfg.n = n;
  cfg.p = p;
  cfg.reps = reps;
  cfg.law = law;
  cfg.tests = {TestKind::Lrt};
  cfg.grid = {CovarianceModel::identity(p)};
  cfg.seed = seed;
  cfg.workers = workers;
  cfg.validate();
  const double d = delta.value_or(delta_of(law));
  const auto outcomes = simulate_grid_point(cfg, 0, Vector::Zero(static_cast<Eigen::Index>(p)), d);
  std::vector<double> z;
  z.reserve(outcomes.size());
  for (const auto& o : outcomes) z.push_back(o.standardized);
  const auto [mean, var] = mean_variance(z);
  const double r = static_cast<double>(reps);
  return {reps, d, mean, var, ks_distance_normal(std::move(z)), 4.0 / std::sqrt(r),
          4.0 * std::sqrt(2.0 / r)};
}

struct EpsilonSummary {
  std::size_t reps;
  double mean;
  double mean_stderr;
  double variance;
  double variance_stderr;
  double exact_variance;  // 2/(n-1) tr(D^2) + Delta/n tr(D o D), D = Sigma - I
  double bound;           // (2 + Delta)/(n-1) tr(D^2)

  bool mean_ok() const { return std::abs(mean) <= 4.0 * mean_stderr; }
  bool variance_matches() const {
    return std::abs(variance - exact_variance) <= 4.0 * variance_stderr;
  }
  bool bound_ok() const { return variance <= 1.1 * bound; }
};

// Simulates eps_n = tr((Sigma - I) B_n) - tr(Sigma - I), B_n the sample
// covariance of the innovations.
inline EpsilonSummary validate_epsilon_bound(const CovarianceModel& cov, std::size_t n,
                                             const InnovationLaw& law, std::size_t reps,
                                             std::uint64_t seed, unsigned workers = 1) {
  if (n < 2) throw InvalidInput("epsilon check requires n >= 2");
  if (reps < 2) throw InvalidInput("epsilon check requires reps >= 2");
  const std::size_t p = cov.dim();
  const auto pi = static_cast<Eigen::Index>(p);
  const Matrix d = materialize(cov).matrix() - Matrix::Identity(pi, pi);
  const double trace_d = d.trace();
  const double nd = static_cast<double>(n);

  std::vector<double> eps(reps);
  parallel_for(reps, workers, [&](std::size_t rep) {
    PhiloxStream rng = substream(seed, StreamPurpose::Dataset, 0, rep);
    Matrix y = sample_innovations(law, p, n, rng);
    y.colwise() -= y.rowwise().mean();
    const double quad = (d * y).cwiseProduct(y).sum() / (nd - 1.0);
    eps[rep] = quad - trace_d;
  });

  const auto [mean, var] = mean_variance(eps);
  const double r = static_cast<double>(reps);
  double m4 = 0.0;
  for (double e : eps) m4 += std::pow(e - mean, 4);
  m4 /= r;
  const double tr_d2 = d.squaredNorm();
  const double hadamard = d.diagonal().squaredNorm();
  const double delta = delta_of(law);
  return {reps,
          mean,
          std::sqrt(var / r),
          var,
          std::sqrt(std::max(0.0, m4 - var * var) / r),
          2.0 / (nd - 1.0) * tr_d2 + delta / nd * hadamard,
          (2.0 + delta) / (nd - 1.0) * tr_d2};
}

}  // namespace hicov
