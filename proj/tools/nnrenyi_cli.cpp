// nnrenyi command-line front end. Talks to the library only through the C API.
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nnrenyi/nnrenyi.h"

namespace {

constexpr int kUsageExit = 2;

struct CliFailure {
  int code;
  std::string message;
};

void check(nnr_status status) {
  if (status != NNR_OK) throw CliFailure{static_cast<int>(status), nnr_last_error()};
}

// Owns a string handed out by the library.
class LibString {
 public:
  LibString() = default;
  LibString(const LibString&) = delete;
  LibString& operator=(const LibString&) = delete;
  ~LibString() { nnr_string_free(ptr_); }
  char** out() { return &ptr_; }
  std::string str() const { return ptr_ ? ptr_ : ""; }

 private:
  char* ptr_ = nullptr;
};

class PointSetHandle {
 public:
  explicit PointSetHandle(const std::string& path) {
    if (path == "-") {
      std::ostringstream buf;
      buf << std::cin.rdbuf();
      check(nnr_pointset_parse_csv(buf.str().c_str(), &ps_));
    } else {
      check(nnr_pointset_from_csv(path.c_str(), &ps_));
    }
  }
  PointSetHandle(const PointSetHandle&) = delete;
  PointSetHandle& operator=(const PointSetHandle&) = delete;
  ~PointSetHandle() { nnr_pointset_free(ps_); }
  const nnr_pointset* get() const { return ps_; }

 private:
  nnr_pointset* ps_ = nullptr;
};

std::vector<unsigned> parse_ranks(const std::string& text) {
  std::vector<unsigned> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const long v = std::stol(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(static_cast<unsigned>(v));
    } catch (const std::exception&) {
      throw CliFailure{kUsageExit, "invalid neighbor set '" + text + "': expected positive integers like 1,2,3"};
    }
  }
  if (out.empty()) throw CliFailure{kUsageExit, "neighbor set must not be empty"};
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliFailure{NNR_IO_ERROR, "cannot open " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out || !(out << text)) throw CliFailure{NNR_IO_ERROR, "cannot write " + path.string()};
}

void print_warnings(const std::string& report_json) {
  const auto j = nlohmann::json::parse(report_json, nullptr, false);
  if (j.is_discarded() || !j.contains("warnings")) return;
  for (const auto& w : j["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
}

struct EstimateArgs {
  std::string input;
  double alpha = 0.7;
  std::string ranks = "1,2,3";
  std::optional<double> gamma;
  bool analytic = false;
  bool histogram = false;
  std::string cache;
  std::size_t n_cal = 200000;
  unsigned reps = 10;
  std::uint64_t seed = 20100601;
};

void add_estimate_options(CLI::App* cmd, EstimateArgs& a) {
  cmd->add_option("input", a.input, "CSV file of samples, one per row ('-' reads stdin)")->required();
  cmd->add_option("--alpha", a.alpha, "Renyi order in (0,1)")->capture_default_str();
  cmd->add_option("--S", a.ranks, "neighbor ranks, e.g. 1,2,3")->capture_default_str();
  cmd->add_option("--gamma", a.gamma, "use this normalizing constant instead of calibrating");
  cmd->add_flag("--analytic-gamma", a.analytic, "closed-form constant (single-rank S only)");
  cmd->add_flag("--histogram", a.histogram, "Scott-rule histogram plug-in instead of the NN estimator");
  cmd->add_option("--cache", a.cache, "gamma cache file (JSON lines)");
  cmd->add_option("--n-cal", a.n_cal, "calibration sample size")->capture_default_str();
  cmd->add_option("--reps", a.reps, "calibration replications")->capture_default_str();
  cmd->add_option("--seed", a.seed, "calibration seed")->capture_default_str();
}

int run_estimate(const EstimateArgs& a, bool mi) {
  PointSetHandle ps(a.input);
  LibString json;
  if (a.histogram) {
    check(mi ? nnr_histogram_mi(ps.get(), a.alpha, nullptr, json.out())
             : nnr_histogram_entropy(ps.get(), a.alpha, nullptr, json.out()));
  } else {
    const std::vector<unsigned> ranks = parse_ranks(a.ranks);
    nnr_estimator_options opts;
    nnr_estimator_options_init(&opts);
    opts.alpha = a.alpha;
    opts.ranks = ranks.data();
    opts.nranks = ranks.size();
    opts.has_gamma = a.gamma.has_value();
    opts.gamma = a.gamma.value_or(0.0);
    opts.analytic_gamma = a.analytic;
    opts.cache_path = a.cache.empty() ? nullptr : a.cache.c_str();
    opts.n_cal = a.n_cal;
    opts.reps = a.reps;
    opts.seed = a.seed;
    check(mi ? nnr_mi(ps.get(), &opts, nullptr, json.out()) : nnr_entropy(ps.get(), &opts, nullptr, json.out()));
  }
  print_warnings(json.str());
  std::cout << json.str() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Renyi entropy and mutual information estimation with nearest-neighbor graphs"};
  app.set_version_flag("--version", nnr_version());
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker thread cap (0: all available)");

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "Monte-Carlo estimate of the normalizing constant gamma");
  unsigned cal_d = 0;
  std::optional<double> cal_alpha, cal_p;
  std::string cal_ranks = "1,2,3", cal_cache;
  std::size_t cal_n = 200000;
  unsigned cal_reps = 10;
  std::uint64_t cal_seed = 20100601;
  cal->add_option("--d", cal_d, "dimension")->required();
  auto* alpha_opt = cal->add_option("--alpha", cal_alpha, "Renyi order in (0,1); sets p = d(1 - alpha)");
  auto* p_opt = cal->add_option("--p", cal_p, "edge-length power");
  alpha_opt->excludes(p_opt);
  cal->add_option("--S", cal_ranks, "neighbor ranks")->capture_default_str();
  cal->add_option("--n-cal", cal_n, "sample size per replication")->capture_default_str();
  cal->add_option("--reps", cal_reps, "replications")->capture_default_str();
  cal->add_option("--seed", cal_seed, "seed")->capture_default_str();
  cal->add_option("--cache", cal_cache, "gamma cache file (JSON lines)");

  EstimateArgs ent_args, mi_args;
  auto* ent = app.add_subcommand("entropy", "Renyi entropy estimate of a CSV sample");
  add_estimate_options(ent, ent_args);
  auto* mi = app.add_subcommand("mi", "Renyi mutual information estimate of a CSV sample");
  add_estimate_options(mi, mi_args);

  auto* rate = app.add_subcommand("rate-experiment", "error versus sample size, long-format CSV");
  std::string rate_config, rate_out, rate_summary;
  std::uint64_t rate_seed = 1;
  rate->add_option("--config", rate_config, "experiment config JSON (default: built-in three setups)");
  rate->add_option("--out", rate_out, "output CSV of per-run errors")->required();
  rate->add_option("--summary", rate_summary, "summary CSV (default: <out>.summary.csv)");
  rate->add_option("--seed", rate_seed, "seed")->capture_default_str();

  auto* isa = app.add_subcommand("isa", "independent subspace analysis on wireframe sources");
  std::string isa_config, isa_out = ".";
  std::uint64_t isa_seed = 1;
  bool paper_scale = false;
  isa->add_option("--config", isa_config, "ISA config JSON (overrides the built-in scale)");
  isa->add_option("--out-dir", isa_out, "directory for solution.json and block_norms.csv")->capture_default_str();
  isa->add_option("--seed", isa_seed, "seed")->capture_default_str();
  isa->add_flag("--paper-scale", paper_scale, "6 sources of dimension 3 instead of 3 of dimension 2");

  auto* diag = app.add_subcommand("diagnostics", "structural checks of the L_p functional");
  std::string diag_grid, diag_out;
  std::uint64_t diag_seed = 1;
  bool quick = false;
  diag->add_option("--grid", diag_grid, "grid JSON (default: built-in grid)");
  diag->add_option("--out", diag_out, "write the report here instead of stdout");
  diag->add_option("--seed", diag_seed, "seed")->capture_default_str();
  diag->add_flag("--quick", quick, "reduced grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageExit;
  }

  try {
    nnr_set_threads(threads);

    if (*cal) {
      double p = 0.0;
      if (cal_p) {
        p = *cal_p;
      } else {
        check(nnr_power_from_alpha(cal_d, cal_alpha.value_or(0.7), &p));
      }
      const std::vector<unsigned> ranks = parse_ranks(cal_ranks);
      LibString json;
      check(nnr_calibrate(cal_d, p, ranks.data(), ranks.size(), cal_n, cal_reps, cal_seed,
                          cal_cache.empty() ? nullptr : cal_cache.c_str(), json.out()));
      std::cout << json.str() << '\n';
      return 0;
    }
    if (*ent) return run_estimate(ent_args, false);
    if (*mi) return run_estimate(mi_args, true);

    if (*rate) {
      const std::string config = rate_config.empty() ? std::string() : read_file(rate_config);
      LibString rows, summary_csv, summary_json;
      check(nnr_rate_experiment(config.empty() ? nullptr : config.c_str(), rate_seed, rows.out(), summary_csv.out(),
                                summary_json.out()));
      write_file(rate_out, rows.str());
      write_file(rate_summary.empty() ? rate_out + ".summary.csv" : rate_summary, summary_csv.str());
      std::cout << summary_json.str() << '\n';
      return 0;
    }

    if (*isa) {
      const std::string config = isa_config.empty() ? std::string() : read_file(isa_config);
      LibString solution, norms;
      check(nnr_isa_experiment(config.empty() ? nullptr : config.c_str(), paper_scale, isa_seed, solution.out(),
                               norms.out()));
      std::error_code ec;
      std::filesystem::create_directories(isa_out, ec);
      if (ec) throw CliFailure{NNR_IO_ERROR, "cannot create " + isa_out + ": " + ec.message()};
      write_file(std::filesystem::path(isa_out) / "solution.json", solution.str());
      write_file(std::filesystem::path(isa_out) / "block_norms.csv", norms.str());
      print_warnings(solution.str());
      std::cout << solution.str() << '\n';
      return 0;
    }

    if (*diag) {
      const std::string grid = diag_grid.empty() ? std::string() : read_file(diag_grid);
      LibString report;
      check(nnr_diagnostics(grid.empty() ? nullptr : grid.c_str(), diag_seed, quick, report.out()));
      if (diag_out.empty())
        std::cout << report.str() << '\n';
      else
        write_file(diag_out, report.str());
      return 0;
    }
  } catch (const CliFailure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  }
  return 0;
}
