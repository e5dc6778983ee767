#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nnrenyi/isa.hpp"
#include "nnrenyi/samplers.hpp"

namespace nnrenyi {

// DistributionSpec <-> JSON. Accepted forms:
//   {"kind": "uniform_cube", "d": 3, "side": 1}
//   {"kind": "gaussian", "mean": [...], "covariance": [[...], ...]}
//   {"kind": "gaussian", "d": 20, "condition_cap": 10, "seed": 7}   (random covariance)
//   {"kind": "wireframe", "shape": 0, "dims": 3}
//   {"kind": "product", "components": [...]}
DistributionSpec distribution_from_json(const std::string& text);
std::string distribution_to_json(const DistributionSpec& spec);

// Renyi MI of the distribution when it has a closed form (uniform cubes,
// Gaussians, products of independent blocks whose pieces are 1-D).
std::optional<double> true_renyi_mi(const DistributionSpec& spec, double alpha);

// Slowest decay exponent e of the MI error bound n^-e for dimension d and p.
double theoretical_rate_exponent(std::size_t d, double p);

struct RateSetup {
  std::string name;
  DistributionSpec distribution;
  std::optional<double> truth;       // overrides the closed form
  std::optional<std::size_t> n_cal;  // per-setup calibration size
};

struct RateConfig {
  std::vector<RateSetup> setups;
  std::vector<std::size_t> sizes{256, 512, 1024, 2048, 4096};
  std::size_t runs = 25;
  double alpha = 0.7;
  std::vector<NeighborSpec> specs{NeighborSpec{3}, NeighborSpec{1, 2, 3}};
  bool histogram = true;
  std::size_t n_cal = 200000;
  unsigned reps = 10;
  std::optional<std::filesystem::path> cache;

  void validate() const;
};

// 3-D uniform, 3-D Gaussian and 20-D Gaussian with random covariances.
RateConfig default_rate_config();
RateConfig rate_config_from_json(const std::string& text);
std::string rate_config_to_json(const RateConfig& config);

struct RateRow {
  std::string setup;
  std::size_t n = 0;  // 0 on note rows
  std::size_t run = 0;
  std::string estimator;
  double estimate = 0.0;
  double truth = 0.0;
  double abs_error = 0.0;
  std::string note;
};

struct RateSummaryRow {
  std::string setup;
  std::string estimator;
  std::size_t n = 0;
  double mean_abs_error = 0.0;
  double sd_abs_error = 0.0;
  double theoretical = 0.0;  // reference curve anchored at the first size
  double exponent = 0.0;
};

struct RateResult {
  std::vector<RateRow> rows;
  std::vector<RateSummaryRow> summary;
};

// Label used in the estimator column: "nn_S3", "nn_S1_2_3", "hist".
std::string estimator_label(const NeighborSpec& spec);

RateResult run_rate_experiment(const RateConfig& config, std::uint64_t seed);

std::string rate_rows_csv(const std::vector<RateRow>& rows);
std::string rate_summary_csv(const std::vector<RateSummaryRow>& rows);
std::string rate_summary_json(const RateConfig& config, const RateResult& result, std::uint64_t seed);

struct IsaConfig {
  std::size_t num_sources = 3;
  std::size_t subspace_dim = 2;
  std::size_t n = 2000;
  double alpha = 0.99;
  NeighborSpec spec{1, 2, 3};
  std::vector<int> shapes{0, 1, 2};  // one wireframe shape per source
  bool identity_mixing = false;
  double condition_cap = 10.0;
  std::size_t n_cal = 200000;
  unsigned reps = 10;
  std::optional<std::filesystem::path> cache;

  void validate() const;
};

IsaConfig isa_desk_config();   // m = 3, d = 2
IsaConfig isa_paper_config();  // m = 6, d = 3, q = 18
IsaConfig isa_config_from_json(const std::string& text, const IsaConfig& base);
std::string isa_config_to_json(const IsaConfig& config);

struct IsaRun {
  IsaConfig config;
  std::uint64_t seed = 0;
  Eigen::MatrixXd mixing;
  IsaSolution solution;
};

// Sources are independent wireframe blocks, mixed by a random (or identity)
// square matrix, then separated by solve_isa.
IsaRun run_isa_experiment(const IsaConfig& config, std::uint64_t seed);

std::string isa_run_json(const IsaRun& run);
std::string matrix_csv(const Eigen::MatrixXd& m);

}  // namespace nnrenyi
