#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lmsamp/config.hpp"
#include "lmsamp/covmap.hpp"
#include "lmsamp/memest.hpp"
#include "lmsamp/procgen.hpp"
#include "lmsamp/samplaw.hpp"

namespace lmsamp::xcli {

/// One sampled-process estimation experiment: generate X along a random walk,
/// estimate the memory parameter, repeat.
///
/// The model is either a FARIMA (simulated by its truncated MA
/// representation, any walk span) or, when `seasonal` is set, a generalized
/// fractional model (sampled exactly through a shared Toeplitz factorization,
/// which caps the walk span at 4096).
struct ExperimentConfig {
  procgen::FarimaSpec model;
  std::optional<procgen::GegenbauerSpec> seasonal;
  samplaw::SamplingLaw law = samplaw::SamplingLaw::pareto(2.8);
  long n = 5000;    // observed values of Y per replication
  long reps = 100;
  std::uint64_t seed = 1;
  memest::EstimatorKind estimator = memest::EstimatorKind::Fexp;
  long estimator_param = -1;  // m for gph, p for fexp; <=0 picks the default
  long maxlag = 200;
  long truncation_m = 5000;
  std::int64_t tmax_cap = 100'000'000;
  int max_retries = 5;
  std::string out_dir = ".";
  int threads = 0;
  std::string echo;  // canonical config text

  void validate() const;
  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_kv(const config::KeyValues& kv);
};

struct RepResult {
  long index = 0;
  std::uint64_t seed = 0;
  double d_hat = 0.0;
  int retries = 0;
  bool ok = false;
  std::string error;
};

struct RunRecord {
  std::string config_echo;
  std::vector<RepResult> reps;
  double mean_d = 0.0;
  double sd_d = 0.0;
  double band_lo = 0.0;  // empirical 2.5% quantile of d_hat
  double band_hi = 0.0;  // empirical 97.5% quantile
  long n_failed = 0;
  // absent for seasonal models, where the rate map is not established
  std::optional<covmap::MemoryPrediction> predicted;
  double wall_seconds = 0.0;
  std::string version;

  /// Recomputes mean/sd/band from the per-replication list.
  void summarize();
};

/// Runs all replications (parallel, deterministic seeds). Throws
/// numeric_error when more than 1% of the replications fail.
RunRecord run_experiment(const ExperimentConfig& cfg);

/// Writes <out_dir>/<stem>_reps.csv and <out_dir>/<stem>_summary.csv.
void write_run_record(const RunRecord& rec, const std::string& out_dir,
                      const std::string& stem);

/// Empirical ACF comparison: the original process and two sampled versions.
struct Fig1Params {
  double d = 0.35;
  double gamma1 = 2.8;
  double gamma2 = 1.9;
  long n = 5000;
  long maxlag = 200;
  long truncation_m = 5000;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  bool svg = true;
};

struct Fig1Output {
  std::string csv_path;
  std::string svg_path;
  CovSeq acf_x, acf_y1, acf_y2;
};

Fig1Output repro_acf_figure(const Fig1Params& p);

/// Estimated memory parameter against the tail exponent of the sampling law.
struct Fig2Params {
  std::vector<double> d_values{0.1, 0.35};
  double gamma_lo = 1.7;
  double gamma_hi = 3.3;
  double gamma_step = 0.1;
  long n = 5000;
  long reps = 100;
  std::uint64_t seed = 1;
  long truncation_m = 5000;
  std::int64_t tmax_cap = 100'000'000;
  std::string out_dir = ".";
  bool svg = true;
  int threads = 0;
};

struct Fig2Cell {
  double gamma = 0.0;
  double d_in = 0.0;
  double d_pred = 0.0;
  double d_hat_mean = 0.0;
  double band_lo = 0.0;
  double band_hi = 0.0;
};

struct Fig2Output {
  std::string csv_path;
  std::string svg_path;
  std::vector<Fig2Cell> cells;
};

Fig2Output repro_dest_figure(const Fig2Params& p);

}  // namespace lmsamp::xcli
