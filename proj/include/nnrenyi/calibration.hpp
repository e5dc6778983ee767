#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "nnrenyi/point_set.hpp"

namespace nnrenyi {

inline constexpr std::size_t kDefaultCalibrationSize = 200000;
inline constexpr unsigned kDefaultCalibrationReps = 10;
inline constexpr std::uint64_t kDefaultSeed = 20100601;

struct GammaKey {
  unsigned d = 0;
  double p = 0.0;
  NeighborSpec spec{1};
  std::size_t n_cal = kDefaultCalibrationSize;
  unsigned reps = kDefaultCalibrationReps;

  // Throws UsageError unless 0 < p < d, d >= 1, n_cal > max(S), reps >= 1.
  void validate() const;

  friend bool operator==(const GammaKey&, const GammaKey&) = default;
};

struct GammaEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  GammaKey key;
  std::uint64_t seed = 0;

  friend bool operator==(const GammaEstimate&, const GammaEstimate&) = default;
};

/// Monte-Carlo estimate of the limit constant of L_p(U_n) / n^(1 - p/d) for
/// uniform samples U_n on [0,1]^d.
///
/// Replication r draws its sample from the stream derive_seed(seed, r), so the
/// result is identical however the replications are scheduled. std_error is
/// the standard error of the replication mean (0 when reps == 1). Finite-n
/// boundary bias is not corrected for.
GammaEstimate estimate_gamma(const GammaKey& key, std::uint64_t seed);

// Single replication value L_p / n^(1-p/d) on a given uniform sample.
double normalized_l_p(const PointSet& sample, const NeighborSpec& spec, double p);

/// Closed-form gamma for S = {k}:
///   gamma = V_d^(-p/d) * Gamma(k + p/d) / Gamma(k),
/// with V_d the volume of the unit ball. Obtained by matching the power
/// functional against the singleton-S Renyi estimator of Leonenko, Pronzato
/// and Savani, or directly from the Gamma(k, 1) limit law of n V_d R_k^d.
double gamma_analytic(unsigned d, double p, unsigned k);
double gamma_analytic(unsigned d, double p, const NeighborSpec& spec);

double unit_ball_volume(unsigned d);

/// Where an estimator's gamma came from.
struct GammaValue {
  double value = 0.0;
  double std_error = 0.0;
  std::string source;  // "explicit", "analytic", "cache", "calibrated"
};

struct GammaRequest {
  unsigned d = 0;
  double p = 0.0;
  NeighborSpec spec{1};
  std::optional<double> explicit_value;
  std::optional<std::filesystem::path> cache_path;
  std::size_t n_cal = kDefaultCalibrationSize;
  unsigned reps = kDefaultCalibrationReps;
  std::uint64_t seed = kDefaultSeed;
};

// explicit value > cache lookup (computing and storing on miss) > fresh calibration.
GammaValue resolve_gamma(const GammaRequest& request);

}  // namespace nnrenyi
