#include "nnrenyi/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <set>
#include <sstream>

#include "nnrenyi/closed_forms.hpp"
#include "nnrenyi/csv_io.hpp"
#include "nnrenyi/error.hpp"
#include "nnrenyi/estimators.hpp"
#include "nnrenyi/rng.hpp"
#include "nnrenyi/version.hpp"

namespace nnrenyi {

using nlohmann::json;

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

json parse_object(const std::string& text, const char* what) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed ") + what + ": " + e.what());
  }
  if (!j.is_object()) throw DataError(std::string("malformed ") + what + ": expected a JSON object");
  return j;
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* what) {
  for (const auto& [key, value] : j.items()) {
    const bool ok = std::any_of(known.begin(), known.end(), [&](const char* k) { return key == k; });
    if (!ok) throw DataError(std::string("malformed ") + what + ": unknown key '" + key + "'");
  }
}

DistributionSpec distribution_from(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  DistributionSpec spec;
  if (kind == "uniform_cube") {
    reject_unknown(j, {"kind", "d", "side"}, "distribution");
    spec.kind = UniformCube{j.at("d").get<std::size_t>(), j.value("side", 1.0)};
  } else if (kind == "gaussian") {
    Gaussian g;
    if (j.contains("covariance")) {
      reject_unknown(j, {"kind", "mean", "covariance"}, "distribution");
      const auto rows = j.at("covariance").get<std::vector<std::vector<double>>>();
      const Eigen::Index d = static_cast<Eigen::Index>(rows.size());
      g.covariance.resize(d, d);
      for (Eigen::Index i = 0; i < d; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != d)
          throw DataError("malformed distribution: covariance must be square");
        for (Eigen::Index k = 0; k < d; ++k) g.covariance(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      }
    } else {
      reject_unknown(j, {"kind", "mean", "d", "condition_cap", "seed"}, "distribution");
      g.covariance = random_covariance(j.at("d").get<std::size_t>(), j.value("condition_cap", 10.0),
                                       j.value("seed", std::uint64_t{1}));
    }
    if (j.contains("mean")) {
      const auto mean = j.at("mean").get<std::vector<double>>();
      g.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    } else {
      g.mean = Eigen::VectorXd::Zero(g.covariance.rows());
    }
    spec.kind = std::move(g);
  } else if (kind == "wireframe") {
    reject_unknown(j, {"kind", "shape", "dims"}, "distribution");
    spec.kind = Wireframe{j.at("shape").get<int>(), j.value("dims", std::size_t{3})};
  } else if (kind == "product") {
    reject_unknown(j, {"kind", "components"}, "distribution");
    Product p;
    for (const auto& c : j.at("components")) p.components.push_back(distribution_from(c));
    spec.kind = std::move(p);
  } else {
    throw DataError("malformed distribution: unknown kind '" + kind + "'");
  }
  spec.validate();
  return spec;
}

json distribution_json(const DistributionSpec& spec) {
  return std::visit(overloaded{
                        [](const UniformCube& u) -> json {
                          return {{"kind", "uniform_cube"}, {"d", u.d}, {"side", u.side}};
                        },
                        [](const Gaussian& g) -> json {
                          json cov = json::array();
                          for (Eigen::Index i = 0; i < g.covariance.rows(); ++i) {
                            json row = json::array();
                            for (Eigen::Index k = 0; k < g.covariance.cols(); ++k) row.push_back(g.covariance(i, k));
                            cov.push_back(row);
                          }
                          return {{"kind", "gaussian"},
                                  {"mean", std::vector<double>(g.mean.data(), g.mean.data() + g.mean.size())},
                                  {"covariance", cov}};
                        },
                        [](const Wireframe& w) -> json {
                          return {{"kind", "wireframe"}, {"shape", w.shape_id}, {"dims", w.dims}};
                        },
                        [](const Product& p) -> json {
                          json comps = json::array();
                          for (const auto& c : p.components) comps.push_back(distribution_json(c));
                          return {{"kind", "product"}, {"components", comps}};
                        },
                    },
                    spec.kind);
}

std::vector<NeighborSpec> specs_from(const json& j) {
  std::vector<NeighborSpec> out;
  for (const auto& s : j) out.emplace_back(s.get<std::vector<unsigned>>());
  return out;
}

json specs_json(const std::vector<NeighborSpec>& specs) {
  json out = json::array();
  for (const auto& s : specs) out.push_back(s.ranks());
  return out;
}

}  // namespace

DistributionSpec distribution_from_json(const std::string& text) {
  const json j = parse_object(text, "distribution");
  try {
    return distribution_from(j);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed distribution: ") + e.what());
  }
}

std::string distribution_to_json(const DistributionSpec& spec) { return distribution_json(spec).dump(); }

std::optional<double> true_renyi_mi(const DistributionSpec& spec, double alpha) {
  return std::visit(overloaded{
                        [](const UniformCube&) -> std::optional<double> { return 0.0; },
                        [&](const Gaussian& g) -> std::optional<double> {
                          return gaussian_renyi_mi(g.covariance, alpha);
                        },
                        [](const Wireframe&) -> std::optional<double> { return std::nullopt; },
                        [&](const Product& p) -> std::optional<double> {
                          // Copula densities of independent blocks multiply.
                          double total = 0.0;
                          for (const auto& c : p.components) {
                            const auto part = true_renyi_mi(c, alpha);
                            if (!part) return std::nullopt;
                            total += *part;
                          }
                          return total;
                        },
                    },
                    spec.kind);
}

double theoretical_rate_exponent(std::size_t d, double p) {
  const double dd = static_cast<double>(d);
  if (!(p > 0.0 && p < dd)) throw UsageError("rate exponent needs 0 < p < d");
  double a = 0.0, b = 0.0;
  if (p <= 1.0) {
    a = (dd - p) / (dd * (2.0 * dd - p));
    b = p / 2.0 - p / dd;
  } else if (p <= dd - 1.0) {
    a = (dd - p) / (dd * (2.0 * dd - p));
    b = 0.5 - p / dd;
  } else {
    a = (dd - p) / (dd * (dd + 1.0));
    b = 0.5 - p / dd;
  }
  return std::min(a, b);
}

void RateConfig::validate() const {
  if (setups.empty()) throw UsageError("rate config: no setups");
  if (sizes.empty()) throw UsageError("rate config: no sample sizes");
  if (runs == 0) throw UsageError("rate config: runs must be positive");
  if (specs.empty() && !histogram) throw UsageError("rate config: no estimators");
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
  for (const auto& s : setups) {
    s.distribution.validate();
    if (!s.truth && !true_renyi_mi(s.distribution, alpha))
      throw UsageError("rate config: setup '" + s.name + "' needs an explicit truth");
  }
  for (auto n : sizes)
    for (const auto& spec : specs)
      if (n <= spec.k()) throw UsageError("rate config: sample size must exceed max(S)");
}

RateConfig default_rate_config() {
  RateConfig c;
  c.setups.push_back({"uniform3d", DistributionSpec{UniformCube{3, 1.0}}, std::nullopt, std::nullopt});
  c.setups.push_back({"gauss3d", DistributionSpec{Gaussian{Eigen::VectorXd::Zero(3), random_covariance(3, 10.0, 3)}},
                      std::nullopt, std::nullopt});
  c.setups.push_back({"gauss20d",
                      DistributionSpec{Gaussian{Eigen::VectorXd::Zero(20), random_covariance(20, 10.0, 20)}},
                      std::nullopt, std::size_t{4096}});
  return c;
}

RateConfig rate_config_from_json(const std::string& text) {
  const json j = parse_object(text, "rate config");
  try {
    reject_unknown(j, {"setups", "sizes", "runs", "alpha", "S", "histogram", "n_cal", "reps", "cache"},
                   "rate config");
    RateConfig c;
    if (j.contains("setups")) {
      c.setups.clear();
      for (const auto& s : j.at("setups")) {
        reject_unknown(s, {"name", "distribution", "truth", "n_cal"}, "rate config setup");
        RateSetup setup{s.at("name").get<std::string>(), distribution_from(s.at("distribution")), std::nullopt,
                        std::nullopt};
        if (s.contains("truth")) setup.truth = s.at("truth").get<double>();
        if (s.contains("n_cal")) setup.n_cal = s.at("n_cal").get<std::size_t>();
        c.setups.push_back(std::move(setup));
      }
    } else {
      c.setups = default_rate_config().setups;
    }
    if (j.contains("sizes")) c.sizes = j.at("sizes").get<std::vector<std::size_t>>();
    if (j.contains("runs")) c.runs = j.at("runs").get<std::size_t>();
    if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
    if (j.contains("S")) c.specs = specs_from(j.at("S"));
    if (j.contains("histogram")) c.histogram = j.at("histogram").get<bool>();
    if (j.contains("n_cal")) c.n_cal = j.at("n_cal").get<std::size_t>();
    if (j.contains("reps")) c.reps = j.at("reps").get<unsigned>();
    if (j.contains("cache")) c.cache = j.at("cache").get<std::string>();
    return c;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed rate config: ") + e.what());
  }
}

namespace {

json rate_config_json(const RateConfig& c) {
  json setups = json::array();
  for (const auto& s : c.setups) {
    json js = {{"name", s.name}, {"distribution", distribution_json(s.distribution)}};
    if (s.truth) js["truth"] = *s.truth;
    if (s.n_cal) js["n_cal"] = *s.n_cal;
    setups.push_back(js);
  }
  json j = {{"setups", setups},       {"sizes", c.sizes},         {"runs", c.runs},
            {"alpha", c.alpha},       {"S", specs_json(c.specs)}, {"histogram", c.histogram},
            {"n_cal", c.n_cal},       {"reps", c.reps}};
  if (c.cache) j["cache"] = c.cache->string();
  return j;
}

}  // namespace

std::string rate_config_to_json(const RateConfig& config) { return rate_config_json(config).dump(2); }

std::string estimator_label(const NeighborSpec& spec) {
  std::string out = "nn_S";
  for (std::size_t i = 0; i < spec.ranks().size(); ++i) {
    if (i) out += '_';
    out += std::to_string(spec.ranks()[i]);
  }
  return out;
}

RateResult run_rate_experiment(const RateConfig& config, std::uint64_t seed) {
  config.validate();
  RateResult result;
  const Rng root(seed);

  for (std::size_t s = 0; s < config.setups.size(); ++s) {
    const RateSetup& setup = config.setups[s];
    const std::size_t d = setup.distribution.dim();
    const double truth = setup.truth ? *setup.truth : *true_renyi_mi(setup.distribution, config.alpha);

    std::vector<EstimatorSettings> settings;
    std::vector<GammaValue> gammas;
    for (const auto& spec : config.specs) {
      EstimatorSettings st;
      st.alpha = config.alpha;
      st.spec = spec;
      st.n_cal = setup.n_cal.value_or(config.n_cal);
      st.reps = config.reps;
      st.seed = root.split(0xCA11B).seed();
      st.gamma_cache = config.cache;
      gammas.push_back(resolve_gamma(st, d));
      settings.push_back(st);
    }

    bool histogram = config.histogram;
    std::string histogram_note;
    const Rng setup_rng = root.split(s);
    for (const std::size_t n : config.sizes) {
      const Rng size_rng = setup_rng.split(n);
      for (std::size_t run = 0; run < config.runs; ++run) {
        const PointSet sample_ps = sample(setup.distribution, n, size_rng.split(run).seed());
        auto push = [&](const std::string& label, double estimate) {
          result.rows.push_back({setup.name, n, run, label, estimate, truth, std::abs(estimate - truth), ""});
        };
        for (std::size_t e = 0; e < settings.size(); ++e)
          push(estimator_label(settings[e].spec), renyi_mi(sample_ps, settings[e], gammas[e]).value);
        if (histogram) {
          try {
            push("hist", histogram_mi(sample_ps, config.alpha).value);
          } catch (const DataError& err) {
            if (std::string_view(err.what()).find("infeasible") == std::string_view::npos) throw;
            histogram = false;
            histogram_note = "histogram baseline not applicable in this dimension (d = " + std::to_string(d) + ")";
          }
        }
      }
    }
    if (!histogram_note.empty()) {
      // Drop any partial histogram rows so the column stays all-or-nothing per setup.
      std::erase_if(result.rows, [&](const RateRow& r) { return r.setup == setup.name && r.estimator == "hist"; });
      result.rows.push_back({setup.name, 0, 0, "hist", 0.0, truth, 0.0, histogram_note});
    }

    std::vector<std::string> labels;
    for (const auto& st : settings) labels.push_back(estimator_label(st.spec));
    if (histogram) labels.push_back("hist");
    const double exponent = theoretical_rate_exponent(d, static_cast<double>(d) * (1.0 - config.alpha));
    for (const auto& label : labels) {
      double anchor = 0.0;
      for (std::size_t i = 0; i < config.sizes.size(); ++i) {
        const std::size_t n = config.sizes[i];
        std::vector<double> errs;
        for (const auto& r : result.rows)
          if (r.setup == setup.name && r.estimator == label && r.n == n && r.note.empty()) errs.push_back(r.abs_error);
        if (errs.empty()) continue;
        double mean = 0.0;
        for (double e : errs) mean += e;
        mean /= static_cast<double>(errs.size());
        double var = 0.0;
        for (double e : errs) var += (e - mean) * (e - mean);
        const double sd = errs.size() > 1 ? std::sqrt(var / static_cast<double>(errs.size() - 1)) : 0.0;
        if (i == 0) anchor = mean;
        const double reference =
            anchor * std::pow(static_cast<double>(n) / static_cast<double>(config.sizes.front()), -exponent);
        result.summary.push_back({setup.name, label, n, mean, sd, reference, exponent});
      }
    }
  }
  return result;
}

std::string rate_rows_csv(const std::vector<RateRow>& rows) {
  std::ostringstream out;
  out << "setup,n,run,estimator,estimate,truth,abs_error,note\n";
  for (const auto& r : rows) {
    if (!r.note.empty()) {
      out << r.setup << ",,," << r.estimator << ",,,," << '"' << r.note << '"' << '\n';
      continue;
    }
    out << r.setup << ',' << r.n << ',' << r.run << ',' << r.estimator << ',' << format_double(r.estimate) << ','
        << format_double(r.truth) << ',' << format_double(r.abs_error) << ",\n";
  }
  return out.str();
}

std::string rate_summary_csv(const std::vector<RateSummaryRow>& rows) {
  std::ostringstream out;
  out << "setup,estimator,n,mean_abs_error,sd_abs_error,theoretical,exponent\n";
  for (const auto& r : rows)
    out << r.setup << ',' << r.estimator << ',' << r.n << ',' << format_double(r.mean_abs_error) << ','
        << format_double(r.sd_abs_error) << ',' << format_double(r.theoretical) << ',' << format_double(r.exponent)
        << '\n';
  return out.str();
}

std::string rate_summary_json(const RateConfig& config, const RateResult& result, std::uint64_t seed) {
  json summary = json::array();
  for (const auto& r : result.summary)
    summary.push_back({{"setup", r.setup},
                       {"estimator", r.estimator},
                       {"n", r.n},
                       {"mean_abs_error", r.mean_abs_error},
                       {"sd_abs_error", r.sd_abs_error},
                       {"theoretical", r.theoretical},
                       {"exponent", r.exponent}});
  json notes = json::array();
  for (const auto& r : result.rows)
    if (!r.note.empty()) notes.push_back({{"setup", r.setup}, {"estimator", r.estimator}, {"note", r.note}});
  json j = {{"tool_version", kToolVersion}, {"seed", seed},     {"config", rate_config_json(config)},
            {"summary", summary},           {"notes", notes}, {"rows", result.rows.size()}};
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// ISA

void IsaConfig::validate() const {
  if (num_sources < 2) throw UsageError("isa config: need at least 2 sources");
  if (subspace_dim < 1 || subspace_dim > 3) throw UsageError("isa config: subspace_dim must be 1, 2 or 3");
  if (shapes.size() != num_sources) throw UsageError("isa config: one shape per source required");
  for (int s : shapes)
    if (s < 0 || s >= kWireframeShapeCount) throw UsageError("isa config: unknown wireframe shape");
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
  if (n <= spec.k()) throw UsageError("isa config: n must exceed max(S)");
  if (!(condition_cap >= 1.0)) throw UsageError("isa config: condition_cap must be >= 1");
}

IsaConfig isa_desk_config() { return IsaConfig{}; }

IsaConfig isa_paper_config() {
  IsaConfig c;
  c.num_sources = 6;
  c.subspace_dim = 3;
  c.shapes = {0, 1, 2, 3, 4, 5};
  return c;
}

IsaConfig isa_config_from_json(const std::string& text, const IsaConfig& base) {
  const json j = parse_object(text, "isa config");
  try {
    reject_unknown(j,
                   {"num_sources", "subspace_dim", "n", "alpha", "S", "shapes", "mixing", "condition_cap", "n_cal",
                    "reps", "cache"},
                   "isa config");
    IsaConfig c = base;
    if (j.contains("num_sources")) c.num_sources = j.at("num_sources").get<std::size_t>();
    if (j.contains("subspace_dim")) c.subspace_dim = j.at("subspace_dim").get<std::size_t>();
    if (j.contains("n")) c.n = j.at("n").get<std::size_t>();
    if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
    if (j.contains("S")) c.spec = NeighborSpec(j.at("S").get<std::vector<unsigned>>());
    if (j.contains("shapes")) {
      c.shapes = j.at("shapes").get<std::vector<int>>();
    } else if (c.shapes.size() != c.num_sources) {
      c.shapes.clear();
      for (std::size_t i = 0; i < c.num_sources; ++i) c.shapes.push_back(static_cast<int>(i % kWireframeShapeCount));
    }
    if (j.contains("mixing")) {
      const std::string m = j.at("mixing").get<std::string>();
      if (m != "identity" && m != "random") throw DataError("malformed isa config: mixing must be identity or random");
      c.identity_mixing = m == "identity";
    }
    if (j.contains("condition_cap")) c.condition_cap = j.at("condition_cap").get<double>();
    if (j.contains("n_cal")) c.n_cal = j.at("n_cal").get<std::size_t>();
    if (j.contains("reps")) c.reps = j.at("reps").get<unsigned>();
    if (j.contains("cache")) c.cache = j.at("cache").get<std::string>();
    return c;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed isa config: ") + e.what());
  }
}

namespace {

json isa_config_json(const IsaConfig& c) {
  json j = {{"num_sources", c.num_sources},
            {"subspace_dim", c.subspace_dim},
            {"n", c.n},
            {"alpha", c.alpha},
            {"S", c.spec.ranks()},
            {"shapes", c.shapes},
            {"mixing", c.identity_mixing ? "identity" : "random"},
            {"condition_cap", c.condition_cap},
            {"n_cal", c.n_cal},
            {"reps", c.reps}};
  if (c.cache) j["cache"] = c.cache->string();
  return j;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(row);
  }
  return out;
}

}  // namespace

std::string isa_config_to_json(const IsaConfig& config) { return isa_config_json(config).dump(2); }

IsaRun run_isa_experiment(const IsaConfig& config, std::uint64_t seed) {
  config.validate();
  const Rng root(seed);
  Product sources;
  for (int shape : config.shapes) sources.components.push_back(DistributionSpec{Wireframe{shape, config.subspace_dim}});
  const DistributionSpec spec{std::move(sources)};
  const PointSet s = sample(spec, config.n, root.split(0).seed());
  const std::size_t q = config.subspace_dim * config.num_sources;

  IsaRun run;
  run.config = config;
  run.seed = seed;
  run.mixing = config.identity_mixing ? Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q))
                                      : random_mixing(q, config.condition_cap, root.split(1).seed());

  EstimatorSettings settings;
  settings.alpha = config.alpha;
  settings.spec = config.spec;
  settings.n_cal = config.n_cal;
  settings.reps = config.reps;
  settings.gamma_cache = config.cache;
  settings.seed = root.split(2).seed();

  IsaProblem problem{mix(s, run.mixing), config.subspace_dim, config.num_sources, run.mixing};
  run.solution = solve_isa(problem, settings, root.split(3).seed());
  return run;
}

std::string isa_run_json(const IsaRun& run) {
  const IsaSolution& sol = run.solution;
  json j = {{"tool_version", kToolVersion},
            {"seed", run.seed},
            {"config", isa_config_json(run.config)},
            {"blocks", sol.blocks},
            {"objective", sol.objective},
            {"swaps", sol.swaps},
            {"separation", matrix_json(sol.separation)},
            {"mixing", matrix_json(run.mixing)},
            {"block_norms", matrix_json(sol.block_norms)},
            {"warnings", sol.warnings}};
  j["amari_block_index"] = sol.score ? json(*sol.score) : json(nullptr);
  return j.dump(2);
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::ostringstream out;
  for (Eigen::Index k = 0; k < m.cols(); ++k) out << (k ? "," : "") << "block_" << k;
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) out << (k ? "," : "") << format_double(m(i, k));
    out << '\n';
  }
  return out.str();
}

}  // namespace nnrenyi
