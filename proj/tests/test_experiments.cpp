#include <gtest/gtest.h>

#include <cmath>
#include <json.hpp>
#include <set>

#include "nnrenyi/closed_forms.hpp"
#include "nnrenyi/error.hpp"
#include "nnrenyi/experiments.hpp"

using namespace nnrenyi;
using nlohmann::json;

namespace {

std::string small_rate_config(const std::string& setup) {
  return R"({"setups": [)" + setup +
         R"(], "sizes": [64, 128], "runs": 2, "S": [[3]], "n_cal": 2000, "reps": 2, "cache": ")" +
         std::string(NNR_TEST_CACHE) + "\"}";
}

}  // namespace

TEST(Distribution, JsonRoundTrip) {
  const std::string text =
      R"({"kind": "product", "components": [{"kind": "uniform_cube", "d": 2, "side": 3},
          {"kind": "gaussian", "mean": [1, 2], "covariance": [[2, 0.5], [0.5, 1]]},
          {"kind": "wireframe", "shape": 4, "dims": 3}]})";
  const DistributionSpec a = distribution_from_json(text);
  EXPECT_EQ(a.dim(), 7u);
  const DistributionSpec b = distribution_from_json(distribution_to_json(a));
  EXPECT_EQ(distribution_to_json(a), distribution_to_json(b));
  const auto& g = std::get<Gaussian>(std::get<Product>(b.kind).components[1].kind);
  EXPECT_DOUBLE_EQ(g.covariance(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(g.mean(1), 2.0);
}

TEST(Distribution, RandomCovarianceForm) {
  const auto spec = distribution_from_json(R"({"kind": "gaussian", "d": 4, "condition_cap": 5, "seed": 9})");
  const auto& g = std::get<Gaussian>(spec.kind);
  EXPECT_TRUE(g.covariance.isApprox(random_covariance(4, 5.0, 9)));
  EXPECT_EQ(g.mean.size(), 4);
}

TEST(Distribution, Malformed) {
  EXPECT_THROW(distribution_from_json("{"), DataError);
  EXPECT_THROW(distribution_from_json(R"({"kind": "cauchy"})"), DataError);
  EXPECT_THROW(distribution_from_json(R"({"kind": "uniform_cube", "d": 2, "colour": 1})"), DataError);
  EXPECT_THROW(distribution_from_json(R"({"kind": "gaussian", "covariance": [[1, 0]]})"), DataError);
}

TEST(TrueMi, ClosedForms) {
  EXPECT_EQ(*true_renyi_mi(DistributionSpec{UniformCube{3, 2.0}}, 0.7), 0.0);
  Eigen::MatrixXd cov(2, 2);
  cov << 1.0, 0.5, 0.5, 1.0;
  const Gaussian g{Eigen::VectorXd::Zero(2), cov};
  EXPECT_DOUBLE_EQ(*true_renyi_mi(DistributionSpec{g}, 0.7), gaussian_renyi_mi(cov, 0.7));
  Product p{{DistributionSpec{g}, DistributionSpec{g}}};
  EXPECT_NEAR(*true_renyi_mi(DistributionSpec{p}, 0.7), 2.0 * gaussian_renyi_mi(cov, 0.7), 1e-12);
  EXPECT_FALSE(true_renyi_mi(DistributionSpec{Wireframe{0, 2}}, 0.7).has_value());
}

TEST(RateExponent, KnownValues) {
  EXPECT_NEAR(theoretical_rate_exponent(3, 0.9), 0.1373, 1e-4);
  EXPECT_NEAR(theoretical_rate_exponent(20, 6.0), 0.0206, 1e-4);
  EXPECT_THROW(theoretical_rate_exponent(3, 3.0), UsageError);
  for (std::size_t d = 3; d <= 10; ++d)
    for (double f : {0.1, 0.2, 0.3}) EXPECT_GT(theoretical_rate_exponent(d, f * double(d)), 0.0);
}

TEST(RateConfig, JsonRoundTrip) {
  const RateConfig a = default_rate_config();
  const RateConfig b = rate_config_from_json(rate_config_to_json(a));
  EXPECT_EQ(rate_config_to_json(a), rate_config_to_json(b));
  EXPECT_EQ(b.setups.size(), 3u);
  EXPECT_EQ(b.specs, a.specs);
}

TEST(RateConfig, Invalid) {
  EXPECT_THROW(rate_config_from_json(R"({"sizez": [1]})"), DataError);
  RateConfig c = rate_config_from_json(R"({"sizes": [3]})");
  EXPECT_THROW(c.validate(), UsageError);
  c = rate_config_from_json(R"({"setups": [{"name": "w", "distribution": {"kind": "wireframe", "shape": 0}}]})");
  EXPECT_THROW(c.validate(), UsageError);
}

TEST(RateExperiment, RowCountAndSummary) {
  const RateConfig c = rate_config_from_json(
      small_rate_config(R"({"name": "u2", "distribution": {"kind": "uniform_cube", "d": 2}})"));
  const RateResult r = run_rate_experiment(c, 1);
  // 2 sizes x 2 runs x (nn + histogram)
  EXPECT_EQ(r.rows.size(), 8u);
  EXPECT_EQ(r.summary.size(), 4u);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.truth, 0.0);
    EXPECT_DOUBLE_EQ(row.abs_error, std::abs(row.estimate));
  }
  const std::string csv = rate_rows_csv(r.rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "setup,n,run,estimator,estimate,truth,abs_error,note");
  const json summary = json::parse(rate_summary_json(c, r, 1));
  EXPECT_TRUE(summary.contains("summary"));
}

TEST(RateExperiment, Deterministic) {
  const RateConfig c = rate_config_from_json(
      small_rate_config(R"({"name": "u2", "distribution": {"kind": "uniform_cube", "d": 2}})"));
  EXPECT_EQ(rate_rows_csv(run_rate_experiment(c, 5).rows), rate_rows_csv(run_rate_experiment(c, 5).rows));
}

TEST(RateExperiment, HistogramNoteInHighDimension) {
  const RateConfig c = rate_config_from_json(small_rate_config(
      R"({"name": "g20", "distribution": {"kind": "gaussian", "d": 20, "seed": 3}, "n_cal": 256})"));
  const RateResult r = run_rate_experiment(c, 2);
  std::set<std::string> labels;
  std::size_t notes = 0;
  for (const auto& row : r.rows) {
    labels.insert(row.estimator);
    if (!row.note.empty()) {
      ++notes;
      EXPECT_NE(row.note.find("d = 20"), std::string::npos);
    }
  }
  EXPECT_EQ(notes, 1u);
  EXPECT_EQ(labels, (std::set<std::string>{"nn_S3", "hist"}));
}

TEST(EstimatorLabel, Format) {
  EXPECT_EQ(estimator_label(NeighborSpec{3}), "nn_S3");
  EXPECT_EQ(estimator_label(NeighborSpec{1, 2, 3}), "nn_S1_2_3");
}

TEST(IsaConfig, PresetsAndOverrides) {
  EXPECT_EQ(isa_paper_config().num_sources, 6u);
  EXPECT_EQ(isa_paper_config().subspace_dim, 3u);
  const IsaConfig c = isa_config_from_json(R"({"num_sources": 4, "mixing": "identity"})", isa_desk_config());
  EXPECT_EQ(c.shapes.size(), 4u);
  EXPECT_TRUE(c.identity_mixing);
  const IsaConfig back = isa_config_from_json(isa_config_to_json(c), isa_desk_config());
  EXPECT_EQ(isa_config_to_json(back), isa_config_to_json(c));
}

TEST(IsaConfig, Invalid) {
  EXPECT_THROW(isa_config_from_json(R"({"mixing": "orthogonal"})", isa_desk_config()), DataError);
  EXPECT_THROW(isa_config_from_json(R"({"blocks": 3})", isa_desk_config()), DataError);
  EXPECT_THROW(isa_config_from_json(R"({"subspace_dim": 4})", isa_desk_config()).validate(), UsageError);
  EXPECT_THROW(isa_config_from_json(R"({"shapes": [0, 1, 9]})", isa_desk_config()).validate(), UsageError);
}

TEST(IsaExperiment, IdentityMixingRun) {
  IsaConfig c = isa_config_from_json(R"({"mixing": "identity", "n": 1500})", isa_desk_config());
  c.cache = NNR_TEST_CACHE;
  const IsaRun run = run_isa_experiment(c, 3);
  ASSERT_TRUE(run.solution.score.has_value());
  EXPECT_LT(*run.solution.score, 0.1);
  const json j = json::parse(isa_run_json(run));
  for (const char* key : {"amari_block_index", "blocks", "objective", "separation", "mixing", "block_norms", "config"})
    EXPECT_TRUE(j.contains(key)) << key;
  const std::string csv = matrix_csv(run.solution.block_norms);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "block_0,block_1,block_2");
}
