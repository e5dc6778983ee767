#include "nnrenyi/nnrenyi.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "nnrenyi/calibration.hpp"
#include "nnrenyi/csv_io.hpp"
#include "nnrenyi/diagnostics.hpp"
#include "nnrenyi/error.hpp"
#include "nnrenyi/estimators.hpp"
#include "nnrenyi/experiments.hpp"
#include "nnrenyi/gamma_cache.hpp"
#include "nnrenyi/knn.hpp"
#include "nnrenyi/nn_graph.hpp"
#include "nnrenyi/parallel.hpp"
#include "nnrenyi/version.hpp"

struct nnr_pointset {
  nnrenyi::PointSet points;
};

namespace {

thread_local std::string last_error;

nnr_status fail(nnr_status code, const char* what) {
  last_error = what;
  return code;
}

template <class F>
nnr_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return NNR_OK;
  } catch (const nnrenyi::Error& e) {
    return fail(static_cast<nnr_status>(static_cast<int>(e.kind())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(NNR_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(NNR_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(NNR_INTERNAL_ERROR, "unknown error");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void set_string(char** out, const std::string& s) {
  if (out) *out = copy_string(s);
}

void require(const void* p, const char* name) {
  if (!p) throw nnrenyi::UsageError(std::string(name) + " must not be NULL");
}

nnrenyi::NeighborSpec spec_from(const unsigned* ranks, std::size_t nranks) {
  if (!ranks) return nnrenyi::NeighborSpec{1, 2, 3};
  return nnrenyi::NeighborSpec(std::vector<unsigned>(ranks, ranks + nranks));
}

nnrenyi::EstimatorSettings settings_from(const nnr_estimator_options* opts) {
  nnr_estimator_options defaults;
  nnr_estimator_options_init(&defaults);
  if (!opts) opts = &defaults;
  nnrenyi::EstimatorSettings s;
  s.alpha = opts->alpha;
  s.spec = spec_from(opts->ranks, opts->nranks);
  if (opts->has_gamma) s.gamma = opts->gamma;
  s.analytic_gamma = opts->analytic_gamma != 0;
  if (opts->cache_path) s.gamma_cache = opts->cache_path;
  s.n_cal = opts->n_cal;
  s.reps = opts->reps;
  s.seed = opts->seed;
  s.validate();
  return s;
}

void emit(const nnrenyi::EstimateReport& report, double* out_value, char** out_json) {
  if (out_value) *out_value = report.value;
  set_string(out_json, report.to_json());
}

}  // namespace

extern "C" {

const char* nnr_version(void) { return nnrenyi::kToolVersion; }

const char* nnr_last_error(void) { return last_error.c_str(); }

void nnr_string_free(char* s) { std::free(s); }

void nnr_set_threads(unsigned n) { nnrenyi::set_max_threads(n); }

nnr_status nnr_pointset_create(const double* coords, size_t n, size_t d, nnr_pointset** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    if (n * d > 0) require(coords, "coords");
    std::vector<double> buf(coords, coords + n * d);
    *out = new nnr_pointset{nnrenyi::PointSet(n, d, std::move(buf))};
  });
}

nnr_status nnr_pointset_from_csv(const char* path, nnr_pointset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new nnr_pointset{nnrenyi::read_csv(std::filesystem::path(path)).points};
  });
}

nnr_status nnr_pointset_parse_csv(const char* text, nnr_pointset** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = nullptr;
    *out = new nnr_pointset{nnrenyi::parse_csv(text).points};
  });
}

void nnr_pointset_free(nnr_pointset* ps) { delete ps; }

size_t nnr_pointset_size(const nnr_pointset* ps) { return ps ? ps->points.size() : 0; }

size_t nnr_pointset_dim(const nnr_pointset* ps) { return ps ? ps->points.dim() : 0; }

nnr_status nnr_pointset_coords(const nnr_pointset* ps, const double** out) {
  return guarded([&] {
    require(ps, "point set");
    require(out, "out");
    *out = ps->points.coords().data();
  });
}

nnr_status nnr_knn_query(const nnr_pointset* ps, size_t index, size_t k, size_t* out_indices,
                         double* out_distances) {
  return guarded([&] {
    require(ps, "point set");
    const auto nbrs = nnrenyi::knn_query(ps->points, index, k);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      if (out_indices) out_indices[i] = nbrs[i].index;
      if (out_distances) out_distances[i] = nbrs[i].distance;
    }
  });
}

nnr_status nnr_l_p(const nnr_pointset* ps, const unsigned* ranks, size_t nranks, double p, double* out) {
  return guarded([&] {
    require(ps, "point set");
    require(ranks, "ranks");
    require(out, "out");
    *out = nnrenyi::l_p(ps->points, spec_from(ranks, nranks), p);
  });
}

nnr_status nnr_power_from_alpha(size_t d, double alpha, double* out) {
  return guarded([&] {
    require(out, "out");
    if (d < 1) throw nnrenyi::UsageError("dimension must be >= 1");
    nnrenyi::EstimatorSettings s;
    s.alpha = alpha;
    s.validate();
    *out = s.power(d);
  });
}

nnr_status nnr_gamma_analytic(unsigned d, double p, unsigned k, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = nnrenyi::gamma_analytic(d, p, k);
  });
}

nnr_status nnr_calibrate(unsigned d, double p, const unsigned* ranks, size_t nranks, size_t n_cal, unsigned reps,
                         uint64_t seed, const char* cache_path, char** out_json) {
  return guarded([&] {
    require(ranks, "ranks");
    const nnrenyi::GammaKey key{d, p, spec_from(ranks, nranks), n_cal, reps};
    const nnrenyi::GammaEstimate est = cache_path ? nnrenyi::gamma_cache_get_or_compute(key, cache_path, seed)
                                                  : nnrenyi::estimate_gamma(key, seed);
    set_string(out_json, nnrenyi::gamma_record_to_json(est));
  });
}

void nnr_estimator_options_init(nnr_estimator_options* opts) {
  if (!opts) return;
  *opts = nnr_estimator_options{};
  opts->alpha = 0.7;
  opts->n_cal = nnrenyi::kDefaultCalibrationSize;
  opts->reps = nnrenyi::kDefaultCalibrationReps;
  opts->seed = nnrenyi::kDefaultSeed;
}

nnr_status nnr_entropy(const nnr_pointset* ps, const nnr_estimator_options* opts, double* out_value,
                       char** out_json) {
  return guarded([&] {
    require(ps, "point set");
    emit(nnrenyi::renyi_entropy(ps->points, settings_from(opts)), out_value, out_json);
  });
}

nnr_status nnr_mi(const nnr_pointset* ps, const nnr_estimator_options* opts, double* out_value, char** out_json) {
  return guarded([&] {
    require(ps, "point set");
    emit(nnrenyi::renyi_mi(ps->points, settings_from(opts)), out_value, out_json);
  });
}

nnr_status nnr_histogram_entropy(const nnr_pointset* ps, double alpha, double* out_value, char** out_json) {
  return guarded([&] {
    require(ps, "point set");
    emit(nnrenyi::histogram_entropy(ps->points, alpha), out_value, out_json);
  });
}

nnr_status nnr_histogram_mi(const nnr_pointset* ps, double alpha, double* out_value, char** out_json) {
  return guarded([&] {
    require(ps, "point set");
    emit(nnrenyi::histogram_mi(ps->points, alpha), out_value, out_json);
  });
}

nnr_status nnr_rate_experiment(const char* config_json, uint64_t seed, char** out_rows_csv, char** out_summary_csv,
                               char** out_summary_json) {
  return guarded([&] {
    const nnrenyi::RateConfig config =
        config_json ? nnrenyi::rate_config_from_json(config_json) : nnrenyi::default_rate_config();
    const nnrenyi::RateResult result = nnrenyi::run_rate_experiment(config, seed);
    set_string(out_rows_csv, nnrenyi::rate_rows_csv(result.rows));
    set_string(out_summary_csv, nnrenyi::rate_summary_csv(result.summary));
    set_string(out_summary_json, nnrenyi::rate_summary_json(config, result, seed));
  });
}

nnr_status nnr_isa_experiment(const char* config_json, int paper_scale, uint64_t seed, char** out_solution_json,
                              char** out_block_norms_csv) {
  return guarded([&] {
    const nnrenyi::IsaConfig base = paper_scale ? nnrenyi::isa_paper_config() : nnrenyi::isa_desk_config();
    const nnrenyi::IsaConfig config = config_json ? nnrenyi::isa_config_from_json(config_json, base) : base;
    const nnrenyi::IsaRun run = nnrenyi::run_isa_experiment(config, seed);
    set_string(out_solution_json, nnrenyi::isa_run_json(run));
    set_string(out_block_norms_csv, nnrenyi::matrix_csv(run.solution.block_norms));
  });
}

nnr_status nnr_diagnostics(const char* grid_json, uint64_t seed, int quick, char** out_json) {
  return guarded([&] { set_string(out_json, nnrenyi::run_diagnostics(grid_json ? grid_json : "", seed, quick != 0)); });
}

}  // extern "C"
