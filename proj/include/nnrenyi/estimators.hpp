#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nnrenyi/calibration.hpp"
#include "nnrenyi/point_set.hpp"

namespace nnrenyi {

struct EstimatorSettings {
  double alpha = 0.7;
  NeighborSpec spec{1, 2, 3};

  // Gamma resolution: explicit value, else the analytic form (singleton S
  // only) when requested, else cache, else fresh calibration.
  std::optional<double> gamma;
  bool analytic_gamma = false;
  std::optional<std::filesystem::path> gamma_cache;
  std::size_t n_cal = kDefaultCalibrationSize;
  unsigned reps = kDefaultCalibrationReps;
  std::uint64_t seed = kDefaultSeed;

  // Throws UsageError unless 0 < alpha < 1.
  void validate() const;

  // p = d (1 - alpha).
  double power(std::size_t d) const { return static_cast<double>(d) * (1.0 - alpha); }
};

struct EstimateReport {
  std::string estimator;
  double value = 0.0;
  std::size_t n = 0;
  std::size_t d = 0;
  double alpha = 0.0;
  double p = 0.0;
  std::optional<NeighborSpec> spec;  // absent for the histogram baseline
  std::optional<GammaValue> gamma;
  std::optional<EstimatorSettings> settings;  // calibration settings, when gamma was calibrated
  std::vector<std::string> warnings;

  std::string to_json() const;
};

// Gamma for the given dimension under the settings' resolution order.
GammaValue resolve_gamma(const EstimatorSettings& settings, std::size_t d);

/// Renyi alpha-entropy estimate
///   H = log( L_p / (gamma n^(1 - p/d)) ) / (1 - alpha),   p = d (1 - alpha),
/// with L_p computed on the raw sample. Throws NumericalError("degenerate
/// sample") when L_p == 0.
EstimateReport renyi_entropy(const PointSet& ps, const EstimatorSettings& settings);
EstimateReport renyi_entropy(const PointSet& ps, const EstimatorSettings& settings,
                             const GammaValue& gamma);

// Coordinate j of point i becomes |{l : X_l^j <= X_i^j}| / n.
PointSet empirical_copula(const PointSet& ps);

// Negated entropy estimate of the empirical copula. Warns (but proceeds) when
// d < 3 or alpha is outside (1/2, 1).
EstimateReport renyi_mi(const PointSet& ps, const EstimatorSettings& settings);
EstimateReport renyi_mi(const PointSet& ps, const EstimatorSettings& settings,
                        const GammaValue& gamma);

std::vector<std::string> mi_guarantee_warnings(std::size_t d, double alpha);

// Grid cells allowed for the histogram baseline.
inline constexpr double kMaxHistogramCells = 1e8;

// Histogram plug-in with Scott bin widths h_j = 3.49 sd_j n^(-1/3).
EstimateReport histogram_entropy(const PointSet& ps, double alpha);

// Histogram plug-in of the Renyi MI integrand, evaluated on the empirical copula.
EstimateReport histogram_mi(const PointSet& ps, double alpha);

}  // namespace nnrenyi
