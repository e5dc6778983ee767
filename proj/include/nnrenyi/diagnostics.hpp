#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nnrenyi/point_set.hpp"

namespace nnrenyi {

// Relative tolerance for the translation and scaling identities.
inline constexpr double kIdentityTolerance = 1e-12;

// In-degree factor c(d): max in-degree of NN_S(V) must stay <= c(d) * max(S).
// Kissing numbers; every value observed in the survey sits below them.
std::size_t indegree_factor(std::size_t d);

// Surveyed bounds, frozen at twice the largest value seen on the survey grid
// (see docs/diagnostics.md for the grid and observed maxima).
inline constexpr double kSmoothnessBound = 2.0 * 1.76;    // |dL| / max(|VdV'|^(1-p/d), 1)
inline constexpr double kSubadditivityBound = 2.0 * 1.70;  // excess / m^(d-p)
inline constexpr double kPerturbationBound = 2.0 * 0.091;  // |dL| / (n eps^p)
inline constexpr double kAddOneBound = 2.0 * 0.29;         // |E L(n) - E L(n+1)| / n^(-p/d)
inline constexpr double kGrowthSpreadLimit = 3.0;         // max ratio / median ratio

struct TranslationScalingReport {
  double translation_rel_err = 0.0;
  double scaling_rel_err = 0.0;
  double max_rel_err = 0.0;
  bool pass = false;
};

TranslationScalingReport check_translation_scaling(const PointSet& v, const NeighborSpec& spec, double p,
                                                   double t, std::span<const double> shift);

struct PartitionReport {
  double l_p = 0.0;          // NaN when n <= max(S)
  double l_p_star = 0.0;     // L*_p(V, [0,1]^d)
  double sum_block_star = 0.0;
  double sum_block_plain = 0.0;  // over blocks holding more than max(S) points
  bool boundary_holds = false;   // L*_p <= L_p (vacuous when L_p is undefined)
  bool superadditive_holds = false;
  double boundary_slack = 0.0;
  double superadditivity_slack = 0.0;
  double subadditivity_excess = 0.0;  // L_p - sum_block_plain
  double subadditivity_ratio = 0.0;   // excess / max(m^(d-p), 1)
  std::size_t skipped_blocks = 0;     // blocks too small for a plain NN graph
};

// Subcube index along one axis for the partition of [0,1] into m cells with
// faces i/m; cells are half-open except the last, which is closed.
std::size_t partition_cell(double x, std::size_t m);

PartitionReport check_boundary_and_superadditivity(const PointSet& v, const NeighborSpec& spec, double p,
                                                   std::size_t m);

struct GrowthReport {
  std::size_t max_indegree = 0;
  std::size_t indegree_bound = 0;
  std::vector<std::size_t> sizes;
  std::vector<double> mean_ratio;  // mean of L_p / n^(1-p/d) per size
  double spread = 0.0;             // max / median of mean_ratio
  bool pass = false;
};

// Uniform samples on [0,1]^d.
GrowthReport check_growth_and_indegree(std::size_t trials, std::size_t d, const NeighborSpec& spec, double p,
                                       std::span<const std::size_t> sizes, std::uint64_t seed);

struct SmoothnessReport {
  double difference = 0.0;
  std::size_t symmetric_difference = 0;
  double ratio = 0.0;
};

SmoothnessReport check_smoothness(const PointSet& v, const PointSet& v_prime, const NeighborSpec& spec, double p);

// |V delta V'| with points compared coordinate-exactly, as multisets.
std::size_t symmetric_difference_size(const PointSet& a, const PointSet& b);

struct PerturbationReport {
  double difference = 0.0;
  double ratio = 0.0;  // |L_p(V) - L_p(V + noise)| / (n eps^p)
};

// Moves every point by exactly eps in a random direction.
PerturbationReport check_perturbation(const PointSet& v, const NeighborSpec& spec, double p, double eps,
                                      std::uint64_t seed);

struct AddOneReport {
  double mean_n = 0.0;
  double mean_n_plus_1 = 0.0;
  double ratio = 0.0;  // |difference| / n^(-p/d)
};

AddOneReport check_add_one(std::size_t d, const NeighborSpec& spec, double p, std::size_t n, std::size_t seeds,
                           std::uint64_t seed);

/// Full diagnostics run driven by a JSON grid (empty string: built-in grid).
/// Returns the JSON report; "exact_checks_pass" covers the translation,
/// scaling, boundary and superadditivity checks.
std::string run_diagnostics(const std::string& grid_json, std::uint64_t seed, bool quick);

}  // namespace nnrenyi
