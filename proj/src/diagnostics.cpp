#include "nnrenyi/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>

#include "nnrenyi/error.hpp"
#include "nnrenyi/nn_graph.hpp"
#include "nnrenyi/rng.hpp"
#include "nnrenyi/version.hpp"

namespace nnrenyi {

using nlohmann::json;

std::size_t indegree_factor(std::size_t d) {
  static constexpr std::size_t kissing[] = {0, 2, 6, 12, 24, 40, 72, 126, 240};
  if (d >= 1 && d <= 8) return kissing[d];
  throw UsageError("no in-degree factor for d = " + std::to_string(d));
}

namespace {

double relative_error(double got, double want) {
  if (want == 0.0) return got == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(got - want) / std::abs(want);
}

PointSet uniform_points(std::size_t n, std::size_t d, Rng& rng) {
  std::vector<double> c(n * d);
  for (double& x : c) x = rng.uniform();
  return PointSet(n, d, std::move(c));
}

}  // namespace

TranslationScalingReport check_translation_scaling(const PointSet& v, const NeighborSpec& spec, double p,
                                                   double t, std::span<const double> shift) {
  if (!(t > 0.0)) throw UsageError("scale t must be positive");
  if (shift.size() != v.dim()) throw UsageError("shift dimension does not match points");
  const double base = l_p(v, spec, p);
  std::vector<double> moved(v.coords().begin(), v.coords().end());
  std::vector<double> scaled = moved;
  for (std::size_t i = 0; i < moved.size(); ++i) {
    moved[i] += shift[i % v.dim()];
    scaled[i] *= t;
  }
  TranslationScalingReport r;
  r.translation_rel_err = relative_error(l_p(PointSet(v.size(), v.dim(), moved), spec, p), base);
  r.scaling_rel_err = relative_error(l_p(PointSet(v.size(), v.dim(), scaled), spec, p), std::pow(t, p) * base);
  r.max_rel_err = std::max(r.translation_rel_err, r.scaling_rel_err);
  r.pass = r.max_rel_err <= kIdentityTolerance;
  return r;
}

std::size_t partition_cell(double x, std::size_t m) {
  // Faces are i/m computed exactly as the subcube bounds are.
  std::size_t i = static_cast<std::size_t>(std::max(0.0, std::floor(x * static_cast<double>(m))));
  i = std::min(i, m - 1);
  while (i > 0 && x < static_cast<double>(i) / static_cast<double>(m)) --i;
  while (i + 1 < m && x >= static_cast<double>(i + 1) / static_cast<double>(m)) ++i;
  return i;
}

PartitionReport check_boundary_and_superadditivity(const PointSet& v, const NeighborSpec& spec, double p,
                                                   std::size_t m) {
  if (m < 1) throw UsageError("partition granularity m must be >= 1");
  const std::size_t d = v.dim();
  const Cube unit = Cube::unit(d);
  PartitionReport r;
  r.l_p_star = l_p(build_boundary_graph(v, spec, unit), p);
  const bool plain_defined = v.size() > spec.k();
  r.l_p = plain_defined ? l_p(build_nn_graph(v, spec), p) : std::numeric_limits<double>::quiet_NaN();
  r.boundary_holds = !plain_defined || r.l_p_star <= r.l_p;
  r.boundary_slack = plain_defined ? r.l_p - r.l_p_star : 0.0;

  std::size_t cells = 1;
  for (std::size_t j = 0; j < d; ++j) cells *= m;
  std::vector<std::vector<std::size_t>> members(cells);
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t key = 0;
    for (std::size_t j = 0; j < d; ++j) key = key * m + partition_cell(v.at(i, j), m);
    members[key].push_back(i);
  }

  CompensatedSum star, plain;
  std::vector<double> lower(d), upper(d);
  for (std::size_t key = 0; key < cells; ++key) {
    if (members[key].empty()) continue;
    std::size_t rest = key;
    for (std::size_t j = d; j-- > 0;) {
      const std::size_t c = rest % m;
      rest /= m;
      lower[j] = static_cast<double>(c) / static_cast<double>(m);
      upper[j] = static_cast<double>(c + 1) / static_cast<double>(m);
    }
    const Cube q = Cube::with_faces(lower, upper);
    const PointSet block = v.subset(members[key]);
    star.add(l_p(build_boundary_graph(block, spec, q), p));
    if (block.size() > spec.k())
      plain.add(l_p(build_nn_graph(block, spec), p));
    else
      ++r.skipped_blocks;
  }
  r.sum_block_star = star.value();
  r.sum_block_plain = plain.value();
  r.superadditive_holds = r.sum_block_star <= r.l_p_star;
  r.superadditivity_slack = r.l_p_star - r.sum_block_star;
  if (plain_defined) {
    r.subadditivity_excess = r.l_p - r.sum_block_plain;
    const double scale = std::max(std::pow(static_cast<double>(m), static_cast<double>(d) - p), 1.0);
    r.subadditivity_ratio = std::max(r.subadditivity_excess, 0.0) / scale;
  }
  return r;
}

GrowthReport check_growth_and_indegree(std::size_t trials, std::size_t d, const NeighborSpec& spec, double p,
                                       std::span<const std::size_t> sizes, std::uint64_t seed) {
  if (!(p > 0.0 && p < static_cast<double>(d))) throw UsageError("growth check needs 0 < p < d");
  if (sizes.empty() || trials == 0) throw UsageError("growth check needs sizes and trials");
  GrowthReport r;
  r.indegree_bound = indegree_factor(d) * spec.k();
  const Rng root(seed);
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    const std::size_t n = sizes[s];
    double sum = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      Rng rng = root.split(s * 1000003 + t);
      const PointSet v = uniform_points(n, d, rng);
      const NNGraph g = build_nn_graph(v, spec);
      r.max_indegree = std::max(r.max_indegree, g.max_in_degree());
      sum += l_p(g, p) / std::pow(static_cast<double>(n), 1.0 - p / static_cast<double>(d));
    }
    r.sizes.push_back(n);
    r.mean_ratio.push_back(sum / static_cast<double>(trials));
  }
  std::vector<double> sorted = r.mean_ratio;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  r.spread = sorted.back() / median;
  r.pass = r.max_indegree <= r.indegree_bound && r.spread <= kGrowthSpreadLimit;
  return r;
}

std::size_t symmetric_difference_size(const PointSet& a, const PointSet& b) {
  if (a.dim() != b.dim()) throw UsageError("point sets of differing dimension");
  auto rows = [](const PointSet& ps) {
    std::vector<std::vector<double>> out;
    out.reserve(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) out.emplace_back(ps[i].begin(), ps[i].end());
    std::sort(out.begin(), out.end());
    return out;
  };
  const auto ra = rows(a), rb = rows(b);
  std::size_t i = 0, j = 0, diff = 0;
  while (i < ra.size() && j < rb.size()) {
    if (ra[i] == rb[j]) {
      ++i;
      ++j;
    } else if (ra[i] < rb[j]) {
      ++i;
      ++diff;
    } else {
      ++j;
      ++diff;
    }
  }
  return diff + (ra.size() - i) + (rb.size() - j);
}

SmoothnessReport check_smoothness(const PointSet& v, const PointSet& v_prime, const NeighborSpec& spec,
                                  double p) {
  if (!(p > 0.0 && p < static_cast<double>(v.dim()))) throw UsageError("smoothness check needs 0 < p < d");
  SmoothnessReport r;
  r.difference = std::abs(l_p(v_prime, spec, p) - l_p(v, spec, p));
  r.symmetric_difference = symmetric_difference_size(v, v_prime);
  const double scale = std::max(
      std::pow(static_cast<double>(r.symmetric_difference), 1.0 - p / static_cast<double>(v.dim())), 1.0);
  r.ratio = r.difference / scale;
  return r;
}

PerturbationReport check_perturbation(const PointSet& v, const NeighborSpec& spec, double p, double eps,
                                      std::uint64_t seed) {
  if (!(eps > 0.0)) throw UsageError("perturbation size must be positive");
  Rng rng(seed);
  const std::size_t d = v.dim();
  std::vector<double> moved(v.coords().begin(), v.coords().end());
  std::vector<double> dir(d);
  for (std::size_t i = 0; i < v.size(); ++i) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (double& x : dir) {
        x = rng.normal();
        norm += x * x;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (std::size_t j = 0; j < d; ++j) moved[i * d + j] += eps * dir[j] / norm;
  }
  PerturbationReport r;
  r.difference = std::abs(l_p(v, spec, p) - l_p(PointSet(v.size(), d, std::move(moved)), spec, p));
  r.ratio = r.difference / (static_cast<double>(v.size()) * std::pow(eps, p));
  return r;
}

AddOneReport check_add_one(std::size_t d, const NeighborSpec& spec, double p, std::size_t n, std::size_t seeds,
                           std::uint64_t seed) {
  if (n <= spec.k()) throw UsageError("add-one check needs n > max(S)");
  const Rng root(seed);
  double a = 0.0, b = 0.0;
  for (std::size_t s = 0; s < seeds; ++s) {
    Rng rng = root.split(s);
    // Same stream: the (n+1)-point sample extends the n-point sample.
    const PointSet big = uniform_points(n + 1, d, rng);
    std::vector<std::size_t> first(n);
    for (std::size_t i = 0; i < n; ++i) first[i] = i;
    a += l_p(big.subset(first), spec, p);
    b += l_p(big, spec, p);
  }
  AddOneReport r;
  r.mean_n = a / static_cast<double>(seeds);
  r.mean_n_plus_1 = b / static_cast<double>(seeds);
  r.ratio = std::abs(r.mean_n - r.mean_n_plus_1) / std::pow(static_cast<double>(n), -p / static_cast<double>(d));
  return r;
}

// ---------------------------------------------------------------------------
// Grid-driven report

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

std::vector<NeighborSpec> spec_list(const json& j, const char* key, std::vector<std::vector<unsigned>> fallback) {
  const auto raw = get_or(j, key, fallback);
  std::vector<NeighborSpec> out;
  for (const auto& s : raw) out.emplace_back(s);
  return out;
}

json default_grid(bool quick) {
  json g;
  g["translation_scaling"] = {{"instances", quick ? 2 : 10}, {"n", quick ? 200 : 500},
                              {"dims", {1, 2, 3, 4}}, {"S", {{1}, {1, 2, 3}}},
                              {"powers", {0.5, 1.0, 1.7}}, {"scale", 0.37}};
  g["partition"] = {{"instances", quick ? 2 : 10}, {"n", quick ? json{150, 30} : json{300, 30}}, {"dims", {2, 3}},
                    {"m", {1, 2, 3}}, {"S", {{1}, {1, 2}}}, {"powers", {0.5, 1.0, 1.7}}};
  g["growth"] = {{"trials", quick ? 3 : 20}, {"dims", {1, 2, 3, 5}},
                 {"S", {{1}, {1, 2, 3}, {1, 2, 3, 4, 5}}}, {"power_fraction", 0.5},
                 {"sizes", quick ? json{256, 512, 1024, 2048} : json{256, 512, 1024, 2048, 4096, 8192}}};
  g["smoothness"] = {{"instances", quick ? 5 : 50}, {"n", 500}, {"removed", 100}, {"added", 0},
                     {"dims", {2, 3}}, {"S", {{1}, {1, 2, 3}}}, {"powers", {0.5, 1.5}}};
  g["perturbation"] = {{"instances", quick ? 2 : 5}, {"n", 1000}, {"dims", {3}}, {"S", {{1, 2, 3}}},
                       {"powers", {0.5, 0.9}}, {"eps", {1e-3, 1e-2}}};
  g["add_one"] = {{"d", 2}, {"S", {1}}, {"p", 1.0}, {"sizes", quick ? json{64} : json{64, 256, 1024}},
                  {"seeds", quick ? 50 : 200}};
  return g;
}

}  // namespace

std::string run_diagnostics(const std::string& grid_json, std::uint64_t seed, bool quick) {
  json grid = default_grid(quick);
  if (!grid_json.empty()) {
    json user;
    try {
      user = json::parse(grid_json);
    } catch (const json::exception& e) {
      throw DataError(std::string("malformed diagnostics grid: ") + e.what());
    }
    if (!user.is_object()) throw DataError("malformed diagnostics grid: expected a JSON object");
    static const char* known[] = {"translation_scaling", "partition", "growth", "smoothness", "perturbation",
                                  "add_one"};
    for (const auto& [key, value] : user.items()) {
      if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) ==
          std::end(known))
        throw DataError("malformed diagnostics grid: unknown section '" + key + "'");
      if (!value.is_object()) throw DataError("malformed diagnostics grid: section '" + key + "' must be an object");
      grid[key].update(value);
    }
  }

  json report;
  report["tool_version"] = kToolVersion;
  report["seed"] = seed;
  report["grid"] = grid;
  const Rng root(seed);
  std::uint64_t stream = 0;
  bool exact_ok = true, surveyed_ok = true;

  try {
    // translation / scaling
    {
      const json& c = grid["translation_scaling"];
      double worst = 0.0;
      std::size_t count = 0;
      bool ok = true;
      for (auto d : c.at("dims").get<std::vector<std::size_t>>())
        for (const auto& spec : spec_list(c, "S", {}))
          for (double p : c.at("powers").get<std::vector<double>>())
            for (int t = 0; t < c.at("instances").get<int>(); ++t) {
              Rng rng = root.split(stream++);
              const PointSet v = uniform_points(c.at("n").get<std::size_t>(), d, rng);
              std::vector<double> shift(d);
              for (double& s : shift) s = 2.0 * rng.uniform() - 1.0;
              const auto r = check_translation_scaling(v, spec, p, c.at("scale").get<double>(), shift);
              worst = std::max(worst, r.max_rel_err);
              ok = ok && r.pass;
              ++count;
            }
      report["checks"]["translation_scaling"] = {
          {"instances", count}, {"max_rel_err", worst}, {"tolerance", kIdentityTolerance}, {"pass", ok}};
      exact_ok = exact_ok && ok;
    }
    // boundary bound, superadditivity, subadditivity
    {
      const json& c = grid["partition"];
      std::size_t count = 0, boundary_fail = 0, super_fail = 0;
      double min_boundary_slack = std::numeric_limits<double>::infinity();
      double min_super_slack = std::numeric_limits<double>::infinity();
      double max_sub_ratio = 0.0;
      const json& n_field = c.at("n");
      const auto sizes = n_field.is_array() ? n_field.get<std::vector<std::size_t>>()
                                            : std::vector<std::size_t>{n_field.get<std::size_t>()};
      for (auto n : sizes)
      for (auto d : c.at("dims").get<std::vector<std::size_t>>())
        for (auto m : c.at("m").get<std::vector<std::size_t>>())
          for (const auto& spec : spec_list(c, "S", {}))
            for (double p : c.at("powers").get<std::vector<double>>())
              for (int t = 0; t < c.at("instances").get<int>(); ++t) {
                Rng rng = root.split(stream++);
                const PointSet v = uniform_points(n, d, rng);
                const auto r = check_boundary_and_superadditivity(v, spec, p, m);
                boundary_fail += !r.boundary_holds;
                super_fail += !r.superadditive_holds;
                min_boundary_slack = std::min(min_boundary_slack, r.boundary_slack);
                min_super_slack = std::min(min_super_slack, r.superadditivity_slack);
                if (p < static_cast<double>(d)) max_sub_ratio = std::max(max_sub_ratio, r.subadditivity_ratio);
                ++count;
              }
      const bool ok = boundary_fail == 0 && super_fail == 0;
      report["checks"]["boundary_and_superadditivity"] = {{"instances", count},
                                                          {"boundary_failures", boundary_fail},
                                                          {"superadditivity_failures", super_fail},
                                                          {"min_boundary_slack", min_boundary_slack},
                                                          {"min_superadditivity_slack", min_super_slack},
                                                          {"pass", ok}};
      const bool sub_ok = max_sub_ratio <= kSubadditivityBound;
      report["checks"]["subadditivity"] = {
          {"max_ratio", max_sub_ratio}, {"bound", kSubadditivityBound}, {"pass", sub_ok}};
      exact_ok = exact_ok && ok;
      surveyed_ok = surveyed_ok && sub_ok;
    }
    // in-degree and growth
    {
      const json& c = grid["growth"];
      json rows = json::array();
      bool ok = true;
      const auto sizes = c.at("sizes").get<std::vector<std::size_t>>();
      for (auto d : c.at("dims").get<std::vector<std::size_t>>())
        for (const auto& spec : spec_list(c, "S", {})) {
          const double p = c.at("power_fraction").get<double>() * static_cast<double>(d);
          const auto r = check_growth_and_indegree(c.at("trials").get<std::size_t>(), d, spec, p, sizes,
                                                   root.split(stream++).seed());
          rows.push_back({{"d", d},
                          {"S", spec.ranks()},
                          {"p", p},
                          {"max_indegree", r.max_indegree},
                          {"indegree_bound", r.indegree_bound},
                          {"mean_ratio", r.mean_ratio},
                          {"spread", r.spread},
                          {"pass", r.pass}});
          ok = ok && r.pass;
        }
      report["checks"]["growth_and_indegree"] = {{"cases", rows}, {"pass", ok}};
      surveyed_ok = surveyed_ok && ok;
    }
    // smoothness
    {
      const json& c = grid["smoothness"];
      double worst = 0.0;
      const std::size_t n = c.at("n").get<std::size_t>();
      const std::size_t removed = c.at("removed").get<std::size_t>();
      const std::size_t added = c.at("added").get<std::size_t>();
      if (removed >= n) throw DataError("malformed diagnostics grid: smoothness.removed must be < n");
      for (auto d : c.at("dims").get<std::vector<std::size_t>>())
        for (const auto& spec : spec_list(c, "S", {}))
          for (double p : c.at("powers").get<std::vector<double>>())
            for (int t = 0; t < c.at("instances").get<int>(); ++t) {
              Rng rng = root.split(stream++);
              const PointSet v = uniform_points(n + added, d, rng);
              std::vector<std::size_t> base(n), other;
              for (std::size_t i = 0; i < n; ++i) base[i] = i;
              for (std::size_t i = removed; i < n + added; ++i) other.push_back(i);
              const auto r = check_smoothness(v.subset(base), v.subset(other), spec, p);
              worst = std::max(worst, r.ratio);
            }
      const bool ok = worst <= kSmoothnessBound;
      report["checks"]["smoothness"] = {{"max_ratio", worst}, {"bound", kSmoothnessBound}, {"pass", ok}};
      surveyed_ok = surveyed_ok && ok;
    }
    // perturbation
    {
      const json& c = grid["perturbation"];
      double worst = 0.0;
      for (auto d : c.at("dims").get<std::vector<std::size_t>>())
        for (const auto& spec : spec_list(c, "S", {}))
          for (double p : c.at("powers").get<std::vector<double>>())
            for (double eps : c.at("eps").get<std::vector<double>>())
              for (int t = 0; t < c.at("instances").get<int>(); ++t) {
                Rng rng = root.split(stream++);
                const PointSet v = uniform_points(c.at("n").get<std::size_t>(), d, rng);
                worst = std::max(worst, check_perturbation(v, spec, p, eps, rng.split(1).seed()).ratio);
              }
      const bool ok = worst <= kPerturbationBound;
      report["checks"]["perturbation"] = {{"max_ratio", worst}, {"bound", kPerturbationBound}, {"pass", ok}};
      surveyed_ok = surveyed_ok && ok;
    }
    // add-one (trend only; not part of the pass verdict)
    {
      const json& c = grid["add_one"];
      json rows = json::array();
      const NeighborSpec spec(c.at("S").get<std::vector<unsigned>>());
      for (auto n : c.at("sizes").get<std::vector<std::size_t>>()) {
        const auto r = check_add_one(c.at("d").get<std::size_t>(), spec, c.at("p").get<double>(), n,
                                     c.at("seeds").get<std::size_t>(), root.split(stream++).seed());
        rows.push_back({{"n", n}, {"ratio", r.ratio}, {"within_bound", r.ratio <= kAddOneBound}});
      }
      report["checks"]["add_one"] = {{"cases", rows}, {"bound", kAddOneBound}, {"informational", true}};
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed diagnostics grid: ") + e.what());
  }

  report["exact_checks_pass"] = exact_ok;
  report["surveyed_checks_pass"] = surveyed_ok;
  report["pass"] = exact_ok && surveyed_ok;
  return report.dump(2);
}

}  // namespace nnrenyi
