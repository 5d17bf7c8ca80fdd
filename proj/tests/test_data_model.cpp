#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hicov/data_model.hpp"

using namespace hicov;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

Vector random_unit(std::mt19937_64& gen, Eigen::Index p) {
  std::normal_distribution<double> d;
  Vector v(p);
  for (Eigen::Index i = 0; i < p; ++i) v(i) = d(gen);
  return v.normalized();
}

}  // namespace

TEST(Materialize, StructuredModels) {
  EXPECT_EQ(max_abs_diff(materialize(CovarianceModel::identity(3)).matrix(), Matrix::Identity(3, 3)),
            0.0);

  Matrix spike = Matrix::Identity(2, 2);
  spike(0, 0) = 4.0;
  EXPECT_EQ(max_abs_diff(materialize(CovarianceModel::diagonal_spike(2, 4.0)).matrix(), spike), 0.0);

  // I + 2*sqrt(4/16) e1 e1' expanded by hand: only entry (0,0) moves, to 1 + 2*0.5.
  Matrix expected = Matrix::Identity(4, 4);
  expected(0, 0) = 2.0;
  EXPECT_EQ(max_abs_diff(materialize(CovarianceModel::rank_one_spike(4, 16, 2.0)).matrix(), expected),
            0.0);
}

TEST(Materialize, NullParametersGiveExactIdentity) {
  for (std::size_t p : {1u, 5u, 50u}) {
    const Matrix eye = Matrix::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    EXPECT_EQ(max_abs_diff(materialize(CovarianceModel::diagonal_spike(p, 1.0)).matrix(), eye), 0.0);
    EXPECT_EQ(max_abs_diff(materialize(CovarianceModel::rank_one_spike(p, 200, 0.0)).matrix(), eye),
              0.0);
  }
}

TEST(CovarianceModel, EnforcesInvariants) {
  EXPECT_THROW(CovarianceModel::diagonal_spike(3, 0.0), NotPositiveDefinite);
  EXPECT_THROW(CovarianceModel::diagonal_spike(3, -1.0), NotPositiveDefinite);
  EXPECT_THROW(CovarianceModel::rank_one_spike(3, 12, 1.0, Vector::Ones(3)), InvalidInput);
  EXPECT_THROW(CovarianceModel::rank_one_spike(3, 12, 1.0, Vector::Unit(2, 0)), InvalidInput);
  // h * sqrt(4/16) = -1 makes the matrix singular.
  EXPECT_THROW(CovarianceModel::rank_one_spike(4, 16, -2.0), NotPositiveDefinite);
  Matrix bad = Matrix::Identity(2, 2);
  bad(1, 1) = -0.1;
  EXPECT_THROW(CovarianceModel::explicit_matrix(SymMatrix(bad)), NotPositiveDefinite);
  EXPECT_THROW(CovarianceModel::identity(0), InvalidInput);
}

TEST(CovarianceModel, RankOneRotationInvariance) {
  std::mt19937_64 gen(4);
  const Eigen::Index p = 7;
  const Matrix base = materialize(CovarianceModel::rank_one_spike(p, 28, 1.3)).matrix();
  for (int trial = 0; trial < 10; ++trial) {
    const Vector v = random_unit(gen, p);
    // Householder reflection Q with Q e1 = v.
    Vector w = Vector::Unit(p, 0) - v;
    Matrix q = Matrix::Identity(p, p);
    if (w.norm() > 1e-12) {
      w.normalize();
      q -= 2.0 * w * w.transpose();
    }
    const Matrix rotated = materialize(CovarianceModel::rank_one_spike(p, 28, 1.3, v)).matrix();
    EXPECT_LT(max_abs_diff(rotated, q * base * q.transpose()), 1e-13);
  }
}

TEST(CovarianceRoot, SquaresToMaterializedMatrix) {
  std::mt19937_64 gen(8);
  Matrix a(5, 5);
  std::normal_distribution<double> d;
  for (Eigen::Index i = 0; i < 25; ++i) a.data()[i] = d(gen);
  const std::vector<CovarianceModel> models = {
      CovarianceModel::identity(5),
      CovarianceModel::diagonal_spike(5, 0.01),
      CovarianceModel::rank_one_spike(5, 20, -1.5, random_unit(gen, 5)),
      CovarianceModel::rank_one_spike(5, 20, 3.0),
      CovarianceModel::explicit_matrix(SymMatrix(a.transpose() * a + Matrix::Identity(5, 5))),
  };
  for (const auto& m : models) {
    const Matrix r = CovarianceRoot(m).matrix().matrix();
    EXPECT_LT(max_abs_diff(r * r, materialize(m).matrix()), 1e-12) << m.describe();
    EXPECT_LT(max_abs_diff(r, sqrt_psd(materialize(m)).matrix()), 1e-12) << m.describe();
  }
}

TEST(InnovationLaw, Delta) {
  EXPECT_EQ(delta_of(InnovationLaw::gaussian()), 0.0);
  EXPECT_DOUBLE_EQ(delta_of(InnovationLaw::standardized_gamma(4.0, 0.5)), 1.5);
  EXPECT_DOUBLE_EQ(delta_of(InnovationLaw::standardized_gamma(12.0, 1.0 / std::sqrt(12.0))), 0.5);
}

TEST(InnovationLaw, DeltaMatchesGammaCentralMoment) {
  // E(G - k theta)^4 = 3 k (k + 2) theta^4 for G ~ Gamma(k, theta).
  for (double k : {1.0, 2.0, 4.0, 9.0, 12.0}) {
    const double theta = 1.0 / std::sqrt(k);
    const double m4 = 3.0 * k * (k + 2.0) * std::pow(theta, 4);
    EXPECT_NEAR(delta_of(InnovationLaw::standardized_gamma(k, theta)), m4 - 3.0, 1e-12);
  }
}

TEST(InnovationLaw, RejectsNonStandardizedGamma) {
  EXPECT_THROW(InnovationLaw::standardized_gamma(4.0, 1.0), InvalidInput);
  EXPECT_THROW(InnovationLaw::standardized_gamma(2.5, 1.0 / std::sqrt(2.5)), InvalidInput);
  EXPECT_THROW(InnovationLaw::standardized_gamma(0.0, 1.0), InvalidInput);
}

TEST(SampleDataset, GaussianMoments) {
  const std::size_t n = 100000;
  const DataMatrix x =
      sample_dataset({CovarianceModel::identity(1), InnovationLaw::gaussian(), n, Vector(), 17});
  const Eigen::RowVectorXd row = x.columns().row(0);
  const double mean = row.mean();
  const double var = (row.array() - mean).square().sum() / static_cast<double>(n - 1);
  EXPECT_NEAR(mean, 0.0, 4.0 / std::sqrt(static_cast<double>(n)));
  EXPECT_NEAR(var, 1.0, 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST(SampleDataset, DiagonalSpikeVariance) {
  const std::size_t n = 100000;
  const DataMatrix x = sample_dataset(
      {CovarianceModel::diagonal_spike(2, 4.0), InnovationLaw::gaussian(), n, Vector(), 23});
  const SymMatrix s = sample_covariance(x);
  EXPECT_NEAR(s(0, 0), 4.0, 0.1);
  EXPECT_NEAR(s(1, 1), 1.0, 0.03);
  EXPECT_NEAR(s(0, 1), 0.0, 0.03);
}

TEST(SampleDataset, StandardizedGammaMoments) {
  const InnovationLaw law = InnovationLaw::standardized_gamma(4.0, 0.5);
  auto rng = substream(99, StreamPurpose::Dataset, 0, 0);
  const Matrix y = sample_innovations(law, 10, 100000, rng);
  const double count = static_cast<double>(y.size());
  const double mean = y.mean();
  const double m2 = y.array().square().mean();
  const double m4 = y.array().pow(4).mean();
  // sd(Y) = 1, sd(Y^2) = sqrt(m4 - 1) = sqrt(3.5)
  EXPECT_NEAR(mean, 0.0, 4.0 / std::sqrt(count));
  EXPECT_NEAR(m2, 1.0, 4.0 * std::sqrt(3.5 / count));
  EXPECT_NEAR(m4, 4.5, 0.05);
}

TEST(SampleDataset, MeanIsAdded) {
  Vector mu(3);
  mu << 5.0, -2.0, 0.5;
  const DataMatrix x =
      sample_dataset({CovarianceModel::identity(3), InnovationLaw::gaussian(), 20000, mu, 5});
  const Vector mean = x.columns().rowwise().mean();
  EXPECT_LT((mean - mu).cwiseAbs().maxCoeff(), 4.0 / std::sqrt(20000.0));
  EXPECT_THROW(sample_dataset({CovarianceModel::identity(3), InnovationLaw::gaussian(), 10,
                               Vector::Zero(2), 5}),
               InvalidInput);
}

TEST(SampleDataset, DeterministicPerSeed) {
  const DatasetSpec spec{CovarianceModel::rank_one_spike(6, 30, -1.0),
                         InnovationLaw::standardized_gamma(4.0, 0.5), 30, Vector(), 1234};
  const DataMatrix a = sample_dataset(spec);
  const DataMatrix b = sample_dataset(spec);
  EXPECT_TRUE((a.columns().array() == b.columns().array()).all());
  DatasetSpec other = spec;
  other.seed = 1235;
  EXPECT_FALSE((sample_dataset(other).columns().array() == a.columns().array()).all());
}
