#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>

#include "hicov/errors.hpp"
#include "hicov/linalg.hpp"
#include "hicov/normal_dist.hpp"
#include "hicov/rng.hpp"

namespace hicov {

struct IdentityCov {
  std::size_t p;
};

// diag(rho, 1, ..., 1)
struct DiagonalSpike {
  std::size_t p;
  double rho;
};

// I_p + h * sqrt(p / n_ref) * v v'
struct RankOneSpike {
  std::size_t p;
  std::size_t n_ref;
  double h;
  Vector v;

  // The non-unit eigenvalue minus one, h * sqrt(p / n_ref).
  double magnitude() const {
    return h * std::sqrt(static_cast<double>(p) / static_cast<double>(n_ref));
  }
};

struct ExplicitCov {
  SymMatrix sigma;
};

// Symbolic description of a population covariance. Construct through the
// named factories, which enforce positive definiteness.
class CovarianceModel {
 public:
  using Variant = std::variant<IdentityCov, DiagonalSpike, RankOneSpike, ExplicitCov>;

  static CovarianceModel identity(std::size_t p) {
    if (p < 1) throw InvalidInput("covariance dimension must be >= 1");
    return CovarianceModel(IdentityCov{p});
  }

  static CovarianceModel diagonal_spike(std::size_t p, double rho) {
    if (p < 1) throw InvalidInput("covariance dimension must be >= 1");
    if (!(rho > 0.0) || !std::isfinite(rho)) {
      throw NotPositiveDefinite("diagonal spike requires rho > 0");
    }
    return CovarianceModel(DiagonalSpike{p, rho});
  }

  // v defaults to e_1.
  static CovarianceModel rank_one_spike(std::size_t p, std::size_t n_ref, double h,
                                        std::optional<Vector> v = std::nullopt) {
    if (p < 1) throw InvalidInput("covariance dimension must be >= 1");
    if (n_ref < 1) throw InvalidInput("rank-one spike requires n_ref >= 1");
    Vector dir = v ? *v : Vector::Unit(static_cast<Eigen::Index>(p), 0);
    if (static_cast<std::size_t>(dir.size()) != p) {
      throw InvalidInput("spike direction length must equal p");
    }
    if (std::abs(dir.norm() - 1.0) > 1e-12) throw InvalidInput("spike direction must be a unit vector");
    RankOneSpike spike{p, n_ref, h, std::move(dir)};
    if (!(1.0 + spike.magnitude() > 0.0)) {
      throw NotPositiveDefinite("rank-one spike requires 1 + h*sqrt(p/n_ref) > 0");
    }
    return CovarianceModel(std::move(spike));
  }

  static CovarianceModel explicit_matrix(SymMatrix sigma) {
    logdet_spd(sigma);
    return CovarianceModel(ExplicitCov{std::move(sigma)});
  }

  std::size_t dim() const {
    return std::visit(
        [](const auto& m) -> std::size_t {
          if constexpr (std::is_same_v<std::decay_t<decltype(m)>, ExplicitCov>) {
            return m.sigma.dim();
          } else {
            return m.p;
          }
        },
        variant_);
  }

  const Variant& variant() const noexcept { return variant_; }
  bool is_identity() const { return std::holds_alternative<IdentityCov>(variant_); }

  // Scalar that indexes this model on a power curve: rho for diagonal
  // spikes (identity counts as rho = 1), h for rank-one spikes, none for
  // explicit matrices.
  std::optional<double> grid_parameter() const {
    if (std::holds_alternative<IdentityCov>(variant_)) return 1.0;
    if (const auto* d = std::get_if<DiagonalSpike>(&variant_)) return d->rho;
    if (const auto* r = std::get_if<RankOneSpike>(&variant_)) return r->h;
    return std::nullopt;
  }

  std::string describe() const {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    std::visit(
        [&os](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, IdentityCov>) {
            os << "identity(p=" << m.p << ")";
          } else if constexpr (std::is_same_v<T, DiagonalSpike>) {
            os << "diagonal_spike(p=" << m.p << ", rho=" << m.rho << ")";
          } else if constexpr (std::is_same_v<T, RankOneSpike>) {
            os << "rank_one_spike(p=" << m.p << ", n_ref=" << m.n_ref << ", h=" << m.h << ")";
          } else {
            os << "explicit(p=" << m.sigma.dim() << ")";
          }
        },
        variant_);
    return os.str();
  }

 private:
  explicit CovarianceModel(Variant v) : variant_(std::move(v)) {}
  Variant variant_;
};

inline SymMatrix materialize(const CovarianceModel& cov) {
  const auto p = static_cast<Eigen::Index>(cov.dim());
  return std::visit(
      [p](const auto& m) -> SymMatrix {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, IdentityCov>) {
          return SymMatrix::identity(m.p);
        } else if constexpr (std::is_same_v<T, DiagonalSpike>) {
          Matrix s = Matrix::Identity(p, p);
          s(0, 0) = m.rho;
          return SymMatrix(s);
        } else if constexpr (std::is_same_v<T, RankOneSpike>) {
          const double a = m.magnitude();
          if (a == 0.0) return SymMatrix::identity(m.p);
          Matrix s = Matrix::Identity(p, p);
          s.noalias() += a * m.v * m.v.transpose();
          return SymMatrix(s);
        } else {
          return m.sigma;
        }
      },
      cov.variant());
}

// Distribution of the i.i.d. innovation entries Y_ij: mean 0, variance 1,
// fourth moment 3 + delta.
class InnovationLaw {
 public:
  enum class Kind { Gaussian, StandardizedGamma };

  static InnovationLaw gaussian() { return InnovationLaw(Kind::Gaussian, 0.0, 0.0); }

  // Y = G - k*theta with G ~ Gamma(shape k, scale theta); needs k*theta^2 = 1
  // and integral k.
  static InnovationLaw standardized_gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) throw InvalidInput("gamma shape and scale must be positive");
    if (shape != std::floor(shape)) throw InvalidInput("gamma shape must be integral");
    if (std::abs(shape * scale * scale - 1.0) > 1e-12) {
      throw InvalidInput("standardized gamma needs shape * scale^2 == 1");
    }
    return InnovationLaw(Kind::StandardizedGamma, shape, scale);
  }

  Kind kind() const noexcept { return kind_; }
  double shape() const noexcept { return shape_; }
  double scale() const noexcept { return scale_; }

  // Excess kurtosis E Y^4 - 3.
  double delta() const noexcept { return kind_ == Kind::Gaussian ? 0.0 : 6.0 / shape_; }

  std::string name() const {
    if (kind_ == Kind::Gaussian) return "gaussian";
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << "gamma(" << shape_ << "," << scale_ << ")";
    return os.str();
  }

  double draw(PhiloxStream& rng) const {
    if (kind_ == Kind::Gaussian) return normal_quantile_fast(rng.uniform());
    const int k = static_cast<int>(shape_);
    double log_sum = 0.0;
    for (int i = 0; i < k; ++i) log_sum += std::log(rng.uniform());
    return -scale_ * log_sum - shape_ * scale_;
  }

 private:
  InnovationLaw(Kind kind, double shape, double scale) : kind_(kind), shape_(shape), scale_(scale) {}
  Kind kind_;
  double shape_;
  double scale_;
};

inline double delta_of(const InnovationLaw& law) { return law.delta(); }

// p x n matrix of innovations, filled column by column (observation k
// consumes its p entries before observation k+1).
inline Matrix sample_innovations(const InnovationLaw& law, std::size_t p, std::size_t n,
                                 PhiloxStream& rng) {
  Matrix y(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(n));
  double* data = y.data();
  const std::size_t count = p * n;
  for (std::size_t i = 0; i < count; ++i) data[i] = law.draw(rng);
  return y;
}

// Precomputed Sigma^{1/2}. Diagonal and rank-one models use closed forms.
class CovarianceRoot {
 public:
  explicit CovarianceRoot(const CovarianceModel& cov) : dim_(cov.dim()) {
    std::visit(
        [this](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, IdentityCov>) {
            kind_ = Kind::Identity;
          } else if constexpr (std::is_same_v<T, DiagonalSpike>) {
            kind_ = Kind::Diagonal;
            scale_ = std::sqrt(m.rho);
          } else if constexpr (std::is_same_v<T, RankOneSpike>) {
            kind_ = Kind::RankOne;
            scale_ = std::sqrt(1.0 + m.magnitude()) - 1.0;
            v_ = m.v;
          } else {
            kind_ = Kind::Dense;
            root_ = sqrt_psd(m.sigma).matrix();
          }
        },
        cov.variant());
  }

  std::size_t dim() const noexcept { return dim_; }

  // Y <- Sigma^{1/2} Y
  void apply(Matrix& y) const {
    switch (kind_) {
      case Kind::Identity:
        break;
      case Kind::Diagonal:
        y.row(0) *= scale_;
        break;
      case Kind::RankOne: {
        const Eigen::RowVectorXd proj = v_.transpose() * y;
        y.noalias() += scale_ * v_ * proj;
        break;
      }
      case Kind::Dense:
        y = root_ * y;
        break;
    }
  }

  // Sigma^{1/2} as an explicit matrix.
  SymMatrix matrix() const {
    Matrix eye = Matrix::Identity(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
    apply(eye);
    return SymMatrix(eye);
  }

 private:
  enum class Kind { Identity, Diagonal, RankOne, Dense };
  std::size_t dim_;
  Kind kind_ = Kind::Identity;
  double scale_ = 1.0;
  Vector v_;
  Matrix root_;
};

// X_i = Sigma^{1/2} Y_i + mu for i = 1..n, drawn from the given stream.
inline DataMatrix sample_dataset(const CovarianceRoot& root, const InnovationLaw& law,
                                 std::size_t n, const Vector& mu, PhiloxStream& rng) {
  if (n < 2) throw InvalidInput("dataset requires n >= 2");
  if (static_cast<std::size_t>(mu.size()) != root.dim()) {
    throw InvalidInput("mean vector length must equal p");
  }
  Matrix x = sample_innovations(law, root.dim(), n, rng);
  root.apply(x);
  x.colwise() += mu;
  return DataMatrix(std::move(x));
}

struct DatasetSpec {
  CovarianceModel cov;
  InnovationLaw law;
  std::size_t n;
  Vector mu;  // empty means zero
  std::uint64_t seed;
};

inline DataMatrix sample_dataset(const DatasetSpec& spec) {
  const auto p = static_cast<Eigen::Index>(spec.cov.dim());
  const Vector mu = spec.mu.size() == 0 ? Vector::Zero(p) : spec.mu;
  PhiloxStream rng = substream(spec.seed, StreamPurpose::Dataset, 0, 0);
  return sample_dataset(CovarianceRoot(spec.cov), spec.law, spec.n, mu, rng);
}

}  // namespace hicov
