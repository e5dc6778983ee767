#include "nnrenyi/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>
#include <numeric>
#include <unordered_map>

#include "nnrenyi/closed_forms.hpp"
#include "nnrenyi/error.hpp"
#include "nnrenyi/nn_graph.hpp"
#include "nnrenyi/version.hpp"

namespace nnrenyi {

using nlohmann::json;

void EstimatorSettings::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
}

std::string EstimateReport::to_json() const {
  json j;
  j["estimator"] = estimator;
  j["value"] = value;
  j["n"] = n;
  j["d"] = d;
  j["alpha"] = alpha;
  j["p"] = p;
  if (spec) j["S"] = spec->ranks();
  if (gamma) {
    j["gamma"] = {{"value", gamma->value}, {"std_error", gamma->std_error}, {"source", gamma->source}};
  }
  if (settings) {
    j["calibration"] = {{"n_cal", settings->n_cal}, {"reps", settings->reps}, {"seed", settings->seed}};
    if (settings->gamma_cache) j["calibration"]["cache"] = settings->gamma_cache->string();
  }
  j["warnings"] = warnings;
  j["tool_version"] = kToolVersion;
  return j.dump(2);
}

GammaValue resolve_gamma(const EstimatorSettings& settings, std::size_t d) {
  settings.validate();
  const double p = settings.power(d);
  GammaRequest req;
  req.d = static_cast<unsigned>(d);
  req.p = p;
  req.spec = settings.spec;
  req.explicit_value = settings.gamma;
  if (!settings.gamma && settings.analytic_gamma)
    return GammaValue{gamma_analytic(req.d, p, settings.spec), 0.0, "analytic"};
  req.cache_path = settings.gamma_cache;
  req.n_cal = settings.n_cal;
  req.reps = settings.reps;
  req.seed = settings.seed;
  return resolve_gamma(req);
}

EstimateReport renyi_entropy(const PointSet& ps, const EstimatorSettings& settings) {
  settings.validate();
  if (ps.size() <= settings.spec.k())
    throw DataError("sample smaller than neighbor order: n = " + std::to_string(ps.size()) +
                    ", max(S) = " + std::to_string(settings.spec.k()));
  EstimateReport r = renyi_entropy(ps, settings, resolve_gamma(settings, ps.dim()));
  if (r.gamma->source != "explicit" && r.gamma->source != "analytic") r.settings = settings;
  return r;
}

EstimateReport renyi_entropy(const PointSet& ps, const EstimatorSettings& settings,
                             const GammaValue& gamma) {
  settings.validate();
  if (!(gamma.value > 0.0)) throw UsageError("gamma must be positive");
  const std::size_t n = ps.size(), d = ps.dim();
  const double p = settings.power(d);
  const double lp = l_p(build_nn_graph(ps, settings.spec), p);
  if (!(lp > 0.0)) throw NumericalError("degenerate sample: all nearest-neighbor distances are zero");
  const double scale = gamma.value * std::pow(static_cast<double>(n), 1.0 - p / static_cast<double>(d));
  const double value = std::log(lp / scale) / (1.0 - settings.alpha);
  if (!std::isfinite(value)) throw NumericalError("degenerate sample: non-finite estimate");

  EstimateReport r;
  r.estimator = "renyi_entropy";
  r.value = value;
  r.n = n;
  r.d = d;
  r.alpha = settings.alpha;
  r.p = p;
  r.spec = settings.spec;
  r.gamma = gamma;
  return r;
}

PointSet empirical_copula(const PointSet& ps) {
  const std::size_t n = ps.size(), d = ps.dim();
  std::vector<double> out(n * d);
  std::vector<std::size_t> order(n);
  const double count = static_cast<double>(n);
  for (std::size_t j = 0; j < d; ++j) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return ps.at(a, j) < ps.at(b, j); });
    // Tied values share the rank of the last member of their run.
    std::size_t t = 0;
    while (t < n) {
      std::size_t end = t + 1;
      while (end < n && ps.at(order[end], j) == ps.at(order[t], j)) ++end;
      const double rank = static_cast<double>(end) / count;
      for (std::size_t u = t; u < end; ++u) out[order[u] * d + j] = rank;
      t = end;
    }
  }
  return PointSet(n, d, std::move(out));
}

std::vector<std::string> mi_guarantee_warnings(std::size_t d, double alpha) {
  std::vector<std::string> w;
  if (d < 3) w.push_back("outside the MI consistency guarantee (d >= 3); d = " + std::to_string(d));
  if (!(alpha > 0.5 && alpha < 1.0))
    w.push_back("outside the MI consistency guarantee (alpha in (1/2, 1)); alpha = " +
                json(alpha).dump());
  return w;
}

EstimateReport renyi_mi(const PointSet& ps, const EstimatorSettings& settings) {
  settings.validate();
  if (ps.size() <= settings.spec.k())
    throw DataError("sample smaller than neighbor order: n = " + std::to_string(ps.size()) +
                    ", max(S) = " + std::to_string(settings.spec.k()));
  EstimateReport r = renyi_mi(ps, settings, resolve_gamma(settings, ps.dim()));
  if (r.gamma->source != "explicit" && r.gamma->source != "analytic") r.settings = settings;
  return r;
}

EstimateReport renyi_mi(const PointSet& ps, const EstimatorSettings& settings,
                        const GammaValue& gamma) {
  EstimateReport r = renyi_entropy(empirical_copula(ps), settings, gamma);
  r.estimator = "renyi_mi";
  r.value = -r.value;
  r.warnings = mi_guarantee_warnings(ps.dim(), settings.alpha);
  return r;
}

namespace {

struct HistogramGrid {
  std::vector<double> lo, width;
  std::vector<std::uint64_t> bins;
  std::map<std::uint64_t, std::size_t> joint;  // ordered: fixed summation order
  std::vector<std::vector<std::size_t>> marginal;
};

HistogramGrid build_grid(const PointSet& ps) {
  const std::size_t n = ps.size(), d = ps.dim();
  if (n < 2) throw NumericalError("degenerate sample: histogram needs at least 2 points");
  HistogramGrid g;
  g.lo.resize(d);
  g.width.resize(d);
  g.bins.resize(d);
  double cells = 1.0;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0, lo = ps.at(0, j), hi = lo;
    for (std::size_t i = 0; i < n; ++i) {
      mean += ps.at(i, j);
      lo = std::min(lo, ps.at(i, j));
      hi = std::max(hi, ps.at(i, j));
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (ps.at(i, j) - mean) * (ps.at(i, j) - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0) || !(hi > lo)) throw NumericalError("degenerate sample: constant coordinate");
    g.width[j] = 3.49 * sd * std::pow(static_cast<double>(n), -1.0 / 3.0);
    g.lo[j] = lo;
    const double b = std::max(1.0, std::ceil((hi - lo) / g.width[j]));
    cells *= b;
    if (cells > kMaxHistogramCells)
      throw DataError("histogram infeasible in this dimension (d = " + std::to_string(d) + ")");
    g.bins[j] = static_cast<std::uint64_t>(b);
  }
  g.marginal.resize(d);
  for (std::size_t j = 0; j < d; ++j) g.marginal[j].assign(g.bins[j], 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t key = 0;
    for (std::size_t j = 0; j < d; ++j) {
      auto idx = static_cast<std::uint64_t>((ps.at(i, j) - g.lo[j]) / g.width[j]);
      idx = std::min(idx, g.bins[j] - 1);
      ++g.marginal[j][idx];
      key = key * g.bins[j] + idx;
    }
    ++g.joint[key];
  }
  if (g.joint.size() < 2) throw NumericalError("degenerate sample: a single histogram bin is occupied");
  return g;
}

EstimateReport histogram_report(const PointSet& ps, double alpha, const char* name) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
  EstimateReport r;
  r.estimator = name;
  r.n = ps.size();
  r.d = ps.dim();
  r.alpha = alpha;
  r.p = static_cast<double>(ps.dim()) * (1.0 - alpha);
  return r;
}

}  // namespace

EstimateReport histogram_entropy(const PointSet& ps, double alpha) {
  EstimateReport r = histogram_report(ps, alpha, "histogram_entropy");
  const HistogramGrid g = build_grid(ps);
  const double n = static_cast<double>(ps.size());
  double log_vol = 0.0;
  for (double h : g.width) log_vol += std::log(h);
  // sum over cells of vol * (c / (n vol))^alpha
  CompensatedSum sum;
  for (const auto& [key, c] : g.joint) sum.add(std::pow(static_cast<double>(c) / n, alpha));
  r.value = (std::log(sum.value()) + (1.0 - alpha) * log_vol) / (1.0 - alpha);
  return r;
}

EstimateReport histogram_mi(const PointSet& ps, double alpha) {
  EstimateReport r = histogram_report(ps, alpha, "histogram_mi");
  const PointSet z = empirical_copula(ps);
  const HistogramGrid g = build_grid(z);
  const double n = static_cast<double>(ps.size());
  const std::size_t d = ps.dim();
  // vol f^alpha prod_j f_j^(1-alpha) with f = c/(n vol), f_j = m_j/(n h_j);
  // the widths cancel because vol = prod_j h_j.
  CompensatedSum sum;
  std::vector<std::uint64_t> idx(d);
  for (const auto& [key, c] : g.joint) {
    std::uint64_t rest = key;
    for (std::size_t j = d; j-- > 0;) {
      idx[j] = rest % g.bins[j];
      rest /= g.bins[j];
    }
    double log_term = alpha * std::log(static_cast<double>(c) / n);
    for (std::size_t j = 0; j < d; ++j)
      log_term += (1.0 - alpha) * std::log(static_cast<double>(g.marginal[j][idx[j]]) / n);
    sum.add(std::exp(log_term));
  }
  r.value = std::log(sum.value()) / (alpha - 1.0);
  r.warnings = mi_guarantee_warnings(d, alpha);
  return r;
}

// ---------------------------------------------------------------------------

double gaussian_renyi_entropy(const Eigen::MatrixXd& cov, double alpha) {
  const double d = static_cast<double>(cov.rows());
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw UsageError("covariance is not positive definite");
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return 0.5 * d * std::log(2.0 * M_PI) + 0.5 * logdet - 0.5 * d * std::log(alpha) / (1.0 - alpha);
}

Eigen::MatrixXd correlation_from_covariance(const Eigen::MatrixXd& cov) {
  const Eigen::VectorXd inv_sd = cov.diagonal().array().sqrt().inverse();
  return inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();
}

double gaussian_renyi_mi(const Eigen::MatrixXd& cov, double alpha) {
  const Eigen::MatrixXd r = correlation_from_covariance(cov);
  const auto d = r.rows();
  Eigen::LLT<Eigen::MatrixXd> llt(r);
  if (llt.info() != Eigen::Success) throw UsageError("covariance is not positive definite");
  const double logdet_r = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const Eigen::MatrixXd m =
      alpha * llt.solve(Eigen::MatrixXd::Identity(d, d)) + (1.0 - alpha) * Eigen::MatrixXd::Identity(d, d);
  Eigen::LLT<Eigen::MatrixXd> llt_m(m);
  if (llt_m.info() != Eigen::Success) throw NumericalError("Renyi MI integral diverges");
  const double logdet_m = 2.0 * llt_m.matrixLLT().diagonal().array().log().sum();
  return (-0.5 * alpha * logdet_r - 0.5 * logdet_m) / (alpha - 1.0);
}

double uniform_cube_renyi_entropy(std::size_t d, double side) {
  return static_cast<double>(d) * std::log(side);
}

}  // namespace nnrenyi
