#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nnrenyi/estimators.hpp"
#include "nnrenyi/point_set.hpp"

namespace nnrenyi {

struct Whitening {
  PointSet data;            // zero mean, identity sample covariance
  Eigen::MatrixXd matrix;   // rows = output dims, cols = input dims
  Eigen::VectorXd mean;
};

// Symmetric (ZCA) whitening when out_dim == 0 or equals the input dimension;
// otherwise PCA whitening onto the leading out_dim directions. Covariance
// uses the 1/(n-1) normalization. Throws DataError on singular covariance.
Whitening whiten(const PointSet& ps, std::size_t out_dim = 0);

Eigen::MatrixXd sample_covariance(const PointSet& ps);

struct FastIcaOptions {
  double tolerance = 1e-6;
  int max_iterations = 500;
};

struct FastIcaResult {
  Eigen::MatrixXd unmixing;  // orthogonal; components = unmixing * x
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

/// Symmetric FastICA with the tanh nonlinearity on whitened input.
/// Converged once every row of successive iterates satisfies
/// 1 - |<w_new, w_old>| < tolerance.
FastIcaResult fastica(const PointSet& whitened, std::uint64_t seed, const FastIcaOptions& options = {});

using Partition = std::vector<std::vector<std::size_t>>;

/// Sum of within-block MI estimates, memoized per block.
class GroupingObjective {
 public:
  GroupingObjective(const PointSet& components, const EstimatorSettings& settings);

  double block(std::vector<std::size_t> members);
  double total(const Partition& partition);
  double pair(std::size_t a, std::size_t b);

  std::size_t evaluations() const noexcept { return cache_.size(); }

 private:
  const PointSet& components_;
  EstimatorSettings settings_;
  std::map<std::size_t, GammaValue> gamma_;  // by block dimension
  std::map<std::vector<std::size_t>, double> cache_;
  const GammaValue& gamma_for(std::size_t dim);
};

struct IsaSolution {
  Eigen::MatrixXd separation;        // (dm x q); empty when only grouping was run
  Partition blocks;                  // m blocks of d component indices
  double objective = 0.0;
  std::optional<double> score;       // amari_block_index of separation * A
  Eigen::MatrixXd block_norms;       // m x m, when the true mixing is known
  int swaps = 0;
  std::vector<std::string> warnings;
};

/// Greedy block building on the pairwise MI matrix (seed each block with the
/// most dependent free pair, then add the free component with the largest
/// summed MI to the block) followed by cross-block swap refinement: the
/// best strictly improving swap is applied until none remains.
IsaSolution group_components(const PointSet& components, std::size_t block_dim, std::size_t blocks,
                             const EstimatorSettings& settings);

// Same objective maximized by enumerating all partitions (dm <= 12).
IsaSolution exhaustive_grouping(const PointSet& components, std::size_t block_dim, std::size_t blocks,
                                const EstimatorSettings& settings);

// Number of partitions of d*m items into m unordered blocks of size d.
std::size_t partition_count(std::size_t block_dim, std::size_t blocks);

// m x m matrix of Frobenius norms of the d x d blocks of g.
Eigen::MatrixXd block_norms(const Eigen::MatrixXd& g, std::size_t block_dim, std::size_t blocks);

/// Amari index of the collapsed block-norm matrix, normalized to [0, 1];
/// 0 iff g is a (scaled) block permutation.
double amari_block_index(const Eigen::MatrixXd& g, std::size_t block_dim, std::size_t blocks);

struct IsaProblem {
  PointSet observations;  // n x q
  std::size_t subspace_dim = 1;
  std::size_t num_sources = 2;
  std::optional<Eigen::MatrixXd> true_mixing;  // q x dm

  void validate() const;
};

// Whitening, FastICA, grouping, and scoring when the mixing is known.
IsaSolution solve_isa(const IsaProblem& problem, const EstimatorSettings& settings, std::uint64_t seed,
                      const FastIcaOptions& ica = {});

}  // namespace nnrenyi
