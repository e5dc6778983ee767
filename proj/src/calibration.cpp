#include "nnrenyi/calibration.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "nnrenyi/error.hpp"
#include "nnrenyi/gamma_cache.hpp"
#include "nnrenyi/nn_graph.hpp"
#include "nnrenyi/parallel.hpp"
#include "nnrenyi/rng.hpp"

namespace nnrenyi {

void GammaKey::validate() const {
  if (d < 1) throw UsageError("gamma key: d must be >= 1");
  if (!(p > 0.0 && p < static_cast<double>(d)))
    throw UsageError("gamma key: p must satisfy 0 < p < d");
  if (n_cal <= spec.k()) throw UsageError("gamma key: n_cal must exceed max(S)");
  if (reps < 1) throw UsageError("gamma key: reps must be >= 1");
}

double normalized_l_p(const PointSet& sample, const NeighborSpec& spec, double p) {
  const double n = static_cast<double>(sample.size());
  const double d = static_cast<double>(sample.dim());
  return l_p(build_nn_graph(sample, spec), p) / std::pow(n, 1.0 - p / d);
}

GammaEstimate estimate_gamma(const GammaKey& key, std::uint64_t seed) {
  key.validate();
  std::vector<double> values(key.reps);
  const Rng root(seed);
  parallel_for(
      key.reps,
      [&](std::size_t b, std::size_t e) {
        for (std::size_t r = b; r < e; ++r) {
          Rng rng = root.split(r);
          std::vector<double> coords(key.n_cal * key.d);
          for (double& c : coords) c = rng.uniform();
          values[r] = normalized_l_p(PointSet(key.n_cal, key.d, std::move(coords)), key.spec, key.p);
        }
      },
      1);

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(key.reps);
  double se = 0.0;
  if (key.reps > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    se = std::sqrt(ss / static_cast<double>(key.reps - 1) / static_cast<double>(key.reps));
  }
  return GammaEstimate{mean, se, key, seed};
}

double unit_ball_volume(unsigned d) {
  const double h = 0.5 * static_cast<double>(d);
  return std::exp(h * std::log(std::numbers::pi) - std::lgamma(h + 1.0));
}

double gamma_analytic(unsigned d, double p, unsigned k) {
  if (d < 1 || k < 1) throw UsageError("gamma_analytic: d and k must be >= 1");
  if (!(p > 0.0 && p < static_cast<double>(d)))
    throw UsageError("gamma_analytic: p must satisfy 0 < p < d");
  const double r = p / static_cast<double>(d);
  const double kk = static_cast<double>(k);
  return std::exp(-r * std::log(unit_ball_volume(d)) + std::lgamma(kk + r) - std::lgamma(kk));
}

double gamma_analytic(unsigned d, double p, const NeighborSpec& spec) {
  if (!spec.singleton())
    throw UsageError("analytic form unavailable for S = {" + spec.to_string() +
                     "}; only singleton S has a closed form");
  return gamma_analytic(d, p, spec.k());
}

GammaValue resolve_gamma(const GammaRequest& request) {
  if (request.explicit_value) {
    if (!(*request.explicit_value > 0.0) || !std::isfinite(*request.explicit_value))
      throw UsageError("explicit gamma must be a positive finite number");
    return GammaValue{*request.explicit_value, 0.0, "explicit"};
  }
  GammaKey key{request.d, request.p, request.spec, request.n_cal, request.reps};
  if (request.cache_path) {
    const GammaEstimate est = gamma_cache_get_or_compute(key, *request.cache_path, request.seed);
    return GammaValue{est.mean, est.std_error, "cache"};
  }
  const GammaEstimate est = estimate_gamma(key, request.seed);
  return GammaValue{est.mean, est.std_error, "calibrated"};
}

}  // namespace nnrenyi
