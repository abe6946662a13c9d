#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lmsamp/common.hpp"
#include "lmsamp/config.hpp"
#include "lmsamp/covmap.hpp"
#include "lmsamp/csv.hpp"
#include "lmsamp/experiment.hpp"
#include "lmsamp/procgen.hpp"

using namespace lmsamp;
using namespace lmsamp::xcli;

namespace {

std::string temp_dir(const char* tag) {
  auto p = std::filesystem::temp_directory_path() /
           (std::string("lmsamp_test_") + tag);
  std::filesystem::create_directories(p);
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("config: parsing, defaults, unknown keys") {
  auto kv = config::KeyValues::parse_text(
      "d = 0.35\nlaw = pareto:2.8\nn = 1000\nreps = 4\nseed = 9\n"
      "estimator = gph\n# comment\n");
  auto cfg = ExperimentConfig::from_kv(kv);
  CHECK(cfg.model.d == doctest::Approx(0.35));
  CHECK(cfg.n == 1000);
  CHECK(cfg.reps == 4);
  CHECK(cfg.seed == 9);
  CHECK(cfg.estimator == memest::EstimatorKind::Gph);
  CHECK(cfg.truncation_m == 5000);

  auto bad = config::KeyValues::parse_text("d = 0.2\nwhoops = 1\n");
  CHECK_THROWS_AS(ExperimentConfig::from_kv(bad), std::domain_error);
  CHECK_THROWS_AS(config::KeyValues::parse_text("novalue\n"),
                  std::domain_error);
  auto small = config::KeyValues::parse_text("n = 10\n");
  CHECK_THROWS_AS(ExperimentConfig::from_kv(small), std::domain_error);
}

TEST_CASE("run_experiment: identity sampling recovers d") {
  ExperimentConfig cfg;
  cfg.model = procgen::FarimaSpec::fractional(0.35);
  cfg.law = samplaw::SamplingLaw::dirac(1);
  cfg.n = 5000;
  cfg.reps = 20;
  cfg.seed = 42;
  cfg.truncation_m = 3000;
  auto rec = run_experiment(cfg);
  CHECK(rec.n_failed == 0);
  CHECK(std::abs(rec.mean_d - 0.35) < 0.05);
  CHECK(rec.predicted->regime == covmap::MemoryRegime::Preserved);
  CHECK(rec.band_lo <= rec.mean_d);
  CHECK(rec.mean_d <= rec.band_hi);
}

TEST_CASE("run_experiment: deterministic across thread counts") {
  ExperimentConfig cfg;
  cfg.model = procgen::FarimaSpec::fractional(0.2);
  cfg.law = samplaw::SamplingLaw::pareto(2.5);
  cfg.n = 1000;
  cfg.reps = 12;
  cfg.seed = 7;
  cfg.truncation_m = 500;
  cfg.threads = 1;
  auto a = run_experiment(cfg);
  cfg.threads = 8;
  auto b = run_experiment(cfg);
  REQUIRE(a.reps.size() == b.reps.size());
  for (std::size_t i = 0; i < a.reps.size(); ++i) {
    CHECK(a.reps[i].d_hat == b.reps[i].d_hat);  // bitwise
    CHECK(a.reps[i].seed == b.reps[i].seed);
  }

  // byte-identical CSV outputs
  auto dir = temp_dir("det");
  write_run_record(a, dir, "run_a");
  write_run_record(b, dir, "run_b");
  CHECK(slurp(dir + "/run_a_reps.csv") == slurp(dir + "/run_b_reps.csv"));
  CHECK(slurp(dir + "/run_a_summary.csv") ==
        slurp(dir + "/run_b_summary.csv"));
}

TEST_CASE("run_experiment: summary is recomputable from the list") {
  ExperimentConfig cfg;
  cfg.model = procgen::FarimaSpec::fractional(0.1);
  cfg.law = samplaw::SamplingLaw::dirac(2);
  cfg.n = 512;
  cfg.reps = 10;
  cfg.seed = 3;
  cfg.truncation_m = 300;
  auto rec = run_experiment(cfg);
  RunRecord copy = rec;
  copy.mean_d = copy.sd_d = copy.band_lo = copy.band_hi = -1;
  copy.summarize();
  CHECK(copy.mean_d == rec.mean_d);
  CHECK(copy.sd_d == rec.sd_d);
  CHECK(copy.band_lo == rec.band_lo);
  CHECK(copy.band_hi == rec.band_hi);
}

TEST_CASE("run_experiment: seasonal model via the exact sampler") {
  auto kv = config::KeyValues::parse_text(
      "seasonal = 0.5:0.25\nlaw = dirac:2\nn = 256\nreps = 6\nseed = 17\n"
      "estimator = gph\n");
  auto cfg = ExperimentConfig::from_kv(kv);
  REQUIRE(cfg.seasonal.has_value());
  CHECK(cfg.seasonal->components.size() == 1);
  auto rec = run_experiment(cfg);
  CHECK(rec.n_failed == 0);
  CHECK(!rec.predicted.has_value());  // no rate map for seasonal inputs
  for (const auto& r : rec.reps) CHECK(std::isfinite(r.d_hat));

  auto dir = temp_dir("seasonal");
  write_run_record(rec, dir, "seas");
  CHECK(std::filesystem::exists(dir + "/seas_summary.csv"));

  // seasonal + too-long series is rejected up front
  auto big = config::KeyValues::parse_text("seasonal = 0.5:0.25\nn = 5000\n");
  CHECK_THROWS_AS(ExperimentConfig::from_kv(big), std::domain_error);
}

TEST_CASE("exact sampler reuse matches the one-shot path") {
  auto cov = procgen::farima_autocov(procgen::FarimaSpec::fractional(0.2), 32);
  procgen::ExactGaussianSampler sampler(cov, 32);
  auto a = sampler.draw(99);
  auto b = procgen::gen_trajectory_exact(cov, 32, 99);
  CHECK(a == b.values);
  auto c = sampler.draw(100);
  CHECK(a != c);
}

TEST_CASE("run_experiment: walk cap failures surface as errors") {
  ExperimentConfig cfg;
  cfg.model = procgen::FarimaSpec::fractional(0.2);
  cfg.law = samplaw::SamplingLaw::pareto(1.2);  // extremely heavy tail
  cfg.n = 1000;
  cfg.reps = 4;
  cfg.seed = 5;
  cfg.truncation_m = 200;
  cfg.tmax_cap = 2000;  // far below the typical span
  cfg.max_retries = 1;
  CHECK_THROWS_AS(run_experiment(cfg), numeric_error);
}

TEST_CASE("repro_acf_figure: format contract and decay ordering") {
  Fig1Params p;
  p.n = 20000;  // per-seed ordering needs more data than the figure default
  p.maxlag = 150;
  p.truncation_m = 1500;
  p.out_dir = temp_dir("fig1");
  p.svg = true;

  int faster = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    p.seed = seed;
    auto out = repro_acf_figure(p);
    CHECK(out.acf_x.values[0] > 0.0);
    auto fit_window = [](const CovSeq& acf) {
      std::vector<double> lx, ly;
      for (long h = 1; h <= 100; ++h) {
        double v = acf.values[static_cast<std::size_t>(h)];
        if (v <= 0.0) continue;
        lx.push_back(std::log(static_cast<double>(h)));
        ly.push_back(std::log(v));
      }
      return -fit_line(lx, ly).slope;
    };
    double a1 = fit_window(out.acf_y1);
    double a2 = fit_window(out.acf_y2);
    ++total;
    if (a2 > a1) ++faster;
  }
  CHECK(total == 10);
  CHECK(faster >= 9);  // the heavier tail decays visibly faster

  // CSV: metadata comment + header + maxlag+1 rows
  std::string text = slurp(p.out_dir + "/fig1_acf.csv");
  long lines = static_cast<long>(std::count(text.begin(), text.end(), '\n'));
  CHECK(lines == 2 + p.maxlag + 1);
  CHECK(text.rfind("# lmsamp", 0) == 0);
  CHECK(text.find("lag,acf_x,acf_y1,acf_y2") != std::string::npos);
  CHECK(std::filesystem::exists(p.out_dir + "/fig1_acf.svg"));
}

TEST_CASE("repro_dest_figure: predictions pass through exactly") {
  Fig2Params p;
  p.d_values = {0.35};
  p.gamma_lo = 1.9;
  p.gamma_hi = 2.8;
  p.gamma_step = 0.3;  // 1.9, 2.2, 2.5, 2.8
  p.n = 1000;
  p.reps = 8;
  p.seed = 11;
  p.truncation_m = 500;
  p.out_dir = temp_dir("fig2");
  auto out = repro_dest_figure(p);
  REQUIRE(out.cells.size() == 4);
  for (const auto& c : out.cells) {
    auto pred = covmap::predict_memory(
        c.d_in, samplaw::SamplingLaw::pareto(c.gamma));
    CHECK(c.d_pred == doctest::Approx(pred.d_out.value_or(0.0))
                          .epsilon(1e-12));
  }
  // gamma = 2.2 > 2 keeps d; gamma = 1.9 reduces it to 0.30
  CHECK(out.cells[0].d_pred == doctest::Approx(0.30));
  CHECK(out.cells[1].d_pred == doctest::Approx(0.35));

  std::string text = slurp(out.csv_path);
  CHECK(text.find("gamma,d_in,d_pred,d_hat_mean,band_lo,band_hi") !=
        std::string::npos);
  CHECK(text.rfind("# lmsamp", 0) == 0);
  CHECK(text.find("seed=11") != std::string::npos);
}

TEST_CASE("csv round trip helper") {
  auto dir = temp_dir("csv");
  csvio::Table t;
  t.header = {"a", "b"};
  t.rows = {{1.0, 2.5}, {3.0, -4.125}};
  csvio::write_csv(dir + "/t.csv", "lmsamp test seed=0", t);
  auto col = csvio::read_last_column(dir + "/t.csv");
  REQUIRE(col.size() == 2);
  CHECK(col[0] == 2.5);
  CHECK(col[1] == -4.125);
}

}  // TEST_SUITE
