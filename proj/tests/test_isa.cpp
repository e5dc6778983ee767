#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nnrenyi/error.hpp"
#include "nnrenyi/isa.hpp"
#include "nnrenyi/samplers.hpp"
#include "oracles.hpp"

using namespace nnrenyi;

namespace {

EstimatorSettings isa_settings() {
  EstimatorSettings s;
  s.alpha = 0.99;
  s.spec = NeighborSpec{1, 2, 3};
  s.gamma_cache = NNR_TEST_CACHE;
  return s;
}

// Largest deviation of |m| from the nearest signed permutation pattern.
double distance_to_signed_permutation(const Eigen::MatrixXd& m) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Eigen::Index j = 0;
    m.row(i).cwiseAbs().maxCoeff(&j);
    for (Eigen::Index k = 0; k < m.cols(); ++k)
      worst = std::max(worst, std::abs(std::abs(m(i, k)) - (k == j ? 1.0 : 0.0)));
  }
  return worst;
}

// Components with block dependence: pairs {0,3}, {1,4}, {2,5} share a shape.
PointSet paired_components(std::size_t n, std::uint64_t seed) {
  Product p;
  for (int shape : {1, 3, 4}) p.components.push_back(DistributionSpec{Wireframe{shape, 2}});
  const PointSet s = sample(DistributionSpec{p}, n, seed);
  const std::vector<std::size_t> order{0, 2, 4, 1, 3, 5};
  return s.columns(order);
}

}  // namespace

TEST(Whiten, IdentityCovarianceAndZeroMean) {
  const PointSet x = sample(DistributionSpec{Gaussian{Eigen::VectorXd::Constant(3, 4.0), random_covariance(3, 50.0, 3)}},
                            3000, 1);
  const Whitening w = whiten(x);
  EXPECT_LT((sample_covariance(w.data) - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT(to_matrix(w.data).colwise().mean().cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Whiten, ScaleInvariant) {
  const PointSet x = oracle::uniform_points(500, 3, 2);
  std::vector<double> c(x.coords().begin(), x.coords().end());
  for (double& v : c) v *= 3.0;
  const Whitening a = whiten(x), b = whiten(PointSet(500, 3, c));
  EXPECT_LT((to_matrix(a.data) - to_matrix(b.data)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Whiten, AlreadyWhiteDataNeedsNoRotation) {
  const Whitening first = whiten(oracle::uniform_points(1000, 2, 3));
  const Whitening again = whiten(first.data);
  EXPECT_LT((again.matrix - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Whiten, ProjectsToFewerDimensions) {
  const PointSet x = sample(DistributionSpec{Gaussian{Eigen::VectorXd::Zero(4), random_covariance(4, 10.0, 5)}}, 2000, 4);
  const Whitening w = whiten(x, 2);
  EXPECT_EQ(w.data.dim(), 2u);
  EXPECT_LT((sample_covariance(w.data) - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Whiten, SingularCovariance) {
  std::vector<double> c;
  for (int i = 0; i < 100; ++i) c.insert(c.end(), {double(i), 2.0 * i});
  EXPECT_THROW(whiten(PointSet(100, 2, c)), DataError);
}

TEST(FastIca, RotatedUniformSources) {
  const PointSet s = oracle::uniform_points(3000, 2, 10, -1.0, 1.0);
  const double t = 0.6;
  Eigen::MatrixXd rot(2, 2);
  rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  const Whitening w = whiten(mix(s, rot));
  const FastIcaResult r = fastica(w.data, 1);
  EXPECT_TRUE(r.converged);
  EXPECT_TRUE(r.warnings.empty());
  // Sources have variance 1/3, so compare against the whitened mixing.
  const Eigen::MatrixXd total = r.unmixing * w.matrix * rot * std::sqrt(1.0 / 3.0);
  EXPECT_LT(distance_to_signed_permutation(total), 0.05) << total;
}

TEST(FastIca, IdentityMixing) {
  const PointSet s = oracle::uniform_points(3000, 3, 11, -1.0, 1.0);
  const Whitening w = whiten(s);
  const FastIcaResult r = fastica(w.data, 2);
  const Eigen::MatrixXd total = r.unmixing * w.matrix * std::sqrt(1.0 / 3.0);
  EXPECT_LT(distance_to_signed_permutation(total), 0.05) << total;
}

TEST(FastIca, UnmixingIsOrthogonal) {
  const Whitening w = whiten(oracle::uniform_points(1000, 4, 12));
  const FastIcaResult r = fastica(w.data, 3);
  EXPECT_LT((r.unmixing * r.unmixing.transpose() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FastIca, GaussianInputHitsIterationCap) {
  const PointSet g = sample(DistributionSpec{Gaussian{Eigen::VectorXd::Zero(6), Eigen::MatrixXd::Identity(6, 6)}}, 2000, 7);
  const FastIcaResult r = fastica(whiten(g).data, 4);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 500);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("did not converge"), std::string::npos);
}

TEST(Grouping, RecoversPairedComponents) {
  const IsaSolution sol = group_components(paired_components(1500, 1), 2, 3, isa_settings());
  EXPECT_EQ(sol.blocks, (Partition{{0, 3}, {1, 4}, {2, 5}}));
}

TEST(Grouping, TwoBlocksOfTwo) {
  Product p;
  for (int shape : {0, 2}) p.components.push_back(DistributionSpec{Wireframe{shape, 2}});
  const PointSet s = sample(DistributionSpec{p}, 1500, 2);
  const std::vector<std::size_t> order{2, 0, 3, 1};
  const IsaSolution sol = group_components(s.columns(order), 2, 2, isa_settings());
  EXPECT_EQ(sol.blocks, (Partition{{0, 2}, {1, 3}}));
}

TEST(Grouping, SingleBlockIsWholeSet) {
  const PointSet x = paired_components(800, 3).columns(std::vector<std::size_t>{0, 3});
  EstimatorSettings s = isa_settings();
  const IsaSolution sol = group_components(x, 2, 1, s);
  EXPECT_EQ(sol.blocks, (Partition{{0, 1}}));
  EXPECT_DOUBLE_EQ(sol.objective, renyi_mi(x, s).value);
}

TEST(Grouping, ShapeMismatch) {
  EXPECT_THROW(group_components(oracle::uniform_points(100, 5, 1), 2, 3, isa_settings()), UsageError);
}

TEST(Grouping, SwapsNeverLowerTheObjective) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const PointSet x = oracle::uniform_points(600, 6, seed);
    const IsaSolution greedy = group_components(x, 2, 3, isa_settings());
    const IsaSolution best = exhaustive_grouping(x, 2, 3, isa_settings());
    EXPECT_LE(greedy.objective, best.objective + 1e-12);
  }
}

TEST(Grouping, ExhaustiveAgreesOnStructuredInstances) {
  int agree = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const PointSet x = paired_components(600, 100 + seed);
    agree += group_components(x, 2, 3, isa_settings()).blocks == exhaustive_grouping(x, 2, 3, isa_settings()).blocks;
  }
  EXPECT_EQ(agree, 5);
}

TEST(Grouping, PartitionCount) {
  EXPECT_EQ(partition_count(2, 3), 15u);
  EXPECT_EQ(partition_count(3, 2), 10u);
  EXPECT_EQ(partition_count(1, 4), 1u);
  EXPECT_EQ(partition_count(3, 4), 15400u);
}

TEST(Amari, BlockPermutationScoresZero) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(6, 6);
  Eigen::MatrixXd r(2, 2);
  r << 0.3, -2.0, 1.5, 0.7;
  g.block(0, 2, 2, 2) = r;
  g.block(2, 4, 2, 2) = 4.0 * r.transpose();
  g.block(4, 0, 2, 2) = -r;
  EXPECT_LE(amari_block_index(g, 2, 3), 1e-12);
}

TEST(Amari, AllOnesScoresOne) { EXPECT_NEAR(amari_block_index(Eigen::MatrixXd::Ones(6, 6), 2, 3), 1.0, 1e-12); }

TEST(Amari, SmallPerturbation) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(6, 6);
  g.block(0, 4, 2, 2) = Eigen::MatrixXd::Identity(2, 2);
  g.block(2, 0, 2, 2) = Eigen::MatrixXd::Identity(2, 2);
  g.block(4, 2, 2, 2) = Eigen::MatrixXd::Identity(2, 2);
  for (Eigen::Index i = 0; i < 6; ++i)
    for (Eigen::Index j = 0; j < 6; ++j) g(i, j) += u(gen);
  EXPECT_LT(amari_block_index(g, 2, 3), 0.05);
  EXPECT_GT(amari_block_index(g, 2, 3), 0.0);
}

TEST(Amari, DimensionMismatch) { EXPECT_THROW(amari_block_index(Eigen::MatrixXd::Ones(5, 5), 2, 3), UsageError); }

TEST(Pipeline, IdentityMixingGivesBlockPermutation) {
  Product p;
  for (int shape : {0, 1, 2}) p.components.push_back(DistributionSpec{Wireframe{shape, 2}});
  const PointSet s = sample(DistributionSpec{p}, 2000, 9);
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(6, 6);
  const IsaSolution sol = solve_isa({s, 2, 3, a}, isa_settings(), 1);
  ASSERT_TRUE(sol.score.has_value());
  EXPECT_LT(*sol.score, 0.05);
  EXPECT_EQ(sol.separation.rows(), 6);
  EXPECT_EQ(sol.block_norms.rows(), 3);
}

TEST(Pipeline, RandomMixing) {
  Product p;
  for (int shape : {3, 4, 5}) p.components.push_back(DistributionSpec{Wireframe{shape, 2}});
  const PointSet s = sample(DistributionSpec{p}, 2000, 10);
  const Eigen::MatrixXd a = random_mixing(6, 10.0, 11);
  const IsaSolution sol = solve_isa({mix(s, a), 2, 3, a}, isa_settings(), 2);
  EXPECT_LT(*sol.score, 0.15);
}

TEST(Pipeline, InvalidProblems) {
  const PointSet x = oracle::uniform_points(100, 4, 1);
  EXPECT_THROW(solve_isa({x, 3, 2, std::nullopt}, isa_settings(), 1), UsageError);
  EXPECT_THROW(solve_isa({x, 2, 1, std::nullopt}, isa_settings(), 1), UsageError);
  EXPECT_THROW(solve_isa({x, 2, 2, Eigen::MatrixXd::Identity(3, 3)}, isa_settings(), 1), UsageError);
}
