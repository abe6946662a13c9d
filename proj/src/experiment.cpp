#include "lmsamp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <sstream>

#include "lmsamp/common.hpp"
#include "lmsamp/csv.hpp"
#include "lmsamp/svg.hpp"

namespace lmsamp::xcli {

namespace {

constexpr std::uint64_t kAttemptStride = 16;

std::vector<double> parse_coeff_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  double pos = q * static_cast<double>(v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

// random walk of n steps under a span cap; nullopt when the cap is hit
std::optional<std::vector<std::int64_t>> capped_walk(
    const samplaw::SamplingLaw& law, long n, std::uint64_t seed,
    std::int64_t cap) {
  std::vector<std::int64_t> times(static_cast<std::size_t>(n));
  times[0] = 0;
  std::mt19937_64 rng(seed);
  for (long j = 1; j < n; ++j) {
    times[static_cast<std::size_t>(j)] =
        times[static_cast<std::size_t>(j - 1)] + samplaw::draw(law, rng);
    if (times[static_cast<std::size_t>(j)] > cap) return std::nullopt;
  }
  return times;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (seasonal)
    seasonal->validate();
  else
    model.validate();
  if (n < 64) throw std::domain_error("experiment requires n >= 64");
  if (reps < 1) throw std::domain_error("experiment requires reps >= 1");
  if (truncation_m < 1)
    throw std::domain_error("truncation order must be >= 1");
  if (tmax_cap < n) throw std::domain_error("walk cap smaller than n");
  if (seasonal && n > 4096)
    throw std::domain_error(
        "seasonal models are sampled exactly; n is capped at 4096");
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  return from_kv(config::KeyValues::parse_file(path));
}

ExperimentConfig ExperimentConfig::from_kv(const config::KeyValues& kv) {
  ExperimentConfig cfg;
  cfg.model.d = kv.get_double("d", 0.35);
  cfg.model.ar = parse_coeff_list(kv.get_str("ar", ""));
  cfg.model.ma = parse_coeff_list(kv.get_str("ma", ""));
  cfg.model.noise_var = kv.get_double("noise_var", 1.0);
  std::string seasonal = kv.get_str("seasonal", "");
  if (!seasonal.empty()) {
    // components "theta_over_pi:d;theta_over_pi:d"
    procgen::GegenbauerSpec spec;
    std::stringstream ss(seasonal);
    std::string item;
    while (std::getline(ss, item, ';')) {
      auto colon = item.find(':');
      if (colon == std::string::npos)
        throw std::domain_error("seasonal component must be theta_over_pi:d");
      procgen::GegenbauerComponent c;
      c.theta = std::stod(item.substr(0, colon)) * std::numbers::pi;
      c.d = std::stod(item.substr(colon + 1));
      spec.components.push_back(c);
    }
    cfg.seasonal = std::move(spec);
  }
  cfg.law = samplaw::SamplingLaw::parse(kv.get_str("law", "pareto:2.8"));
  cfg.n = kv.get_long("n", 5000);
  cfg.reps = kv.get_long("reps", 100);
  cfg.seed = kv.get_u64("seed", 1);
  std::string est = kv.get_str("estimator", "fexp");
  if (est == "fexp")
    cfg.estimator = memest::EstimatorKind::Fexp;
  else if (est == "gph")
    cfg.estimator = memest::EstimatorKind::Gph;
  else
    throw std::domain_error("estimator must be gph or fexp");
  cfg.estimator_param = kv.get_long("estimator_param", -1);
  cfg.maxlag = kv.get_long("maxlag", 200);
  cfg.truncation_m = kv.get_long("truncation_m", 5000);
  cfg.tmax_cap = kv.get_long("tmax_cap", 100'000'000);
  cfg.max_retries = static_cast<int>(kv.get_long("max_retries", 5));
  cfg.out_dir = kv.get_str("out_dir", ".");
  cfg.threads = static_cast<int>(kv.get_long("threads", 0));
  kv.require_all_consumed();
  cfg.echo = kv.echo();
  cfg.validate();
  return cfg;
}

void RunRecord::summarize() {
  std::vector<double> ok_vals;
  n_failed = 0;
  for (const auto& r : reps) {
    if (r.ok)
      ok_vals.push_back(r.d_hat);
    else
      ++n_failed;
  }
  if (ok_vals.empty()) {
    mean_d = sd_d = band_lo = band_hi = 0.0;
    return;
  }
  MeanSd ms = mean_sd(ok_vals);
  mean_d = ms.mean;
  sd_d = ms.sd;
  band_lo = quantile(ok_vals, 0.025);
  band_hi = quantile(ok_vals, 0.975);
}

namespace {

// estimate on one sampled series
double estimate_d(const ExperimentConfig& cfg, std::span<const double> y) {
  memest::EstimateResult est = cfg.estimator == memest::EstimatorKind::Fexp
                                   ? memest::fexp(y, cfg.estimator_param)
                                   : memest::gph(y, cfg.estimator_param);
  return est.d_hat;
}

// walk for replication i (attempt-indexed seed streams); nullopt = cap hit
std::optional<std::vector<std::int64_t>> rep_walk(const ExperimentConfig& cfg,
                                                  std::int64_t cap,
                                                  RepResult& r) {
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    std::uint64_t stream =
        static_cast<std::uint64_t>(r.index) * kAttemptStride +
        static_cast<std::uint64_t>(attempt);
    std::uint64_t walk_seed = derive_seed(cfg.seed, stream, kTagWalk);
    auto times = capped_walk(cfg.law, cfg.n, walk_seed, cap);
    if (times) {
      r.seed = derive_seed(cfg.seed, stream, kTagNoise);
      return times;
    }
    ++r.retries;
  }
  r.error = "walk cap exhausted after retries";
  return std::nullopt;
}

void run_farima_reps(const ExperimentConfig& cfg, RunRecord& rec) {
  procgen::MacoeffTable coeffs =
      procgen::farima_ma_coeffs(cfg.model, cfg.truncation_m);
  parallel_for(rec.reps.size(), resolve_threads(cfg.threads),
               [&](std::size_t i) {
    RepResult& r = rec.reps[i];
    r.index = static_cast<long>(i);
    auto times = rep_walk(cfg, cfg.tmax_cap, r);
    if (!times) return;
    try {
      std::vector<double> y = procgen::gen_at_indices(coeffs, *times, r.seed);
      r.d_hat = estimate_d(cfg, y);
      r.ok = true;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  });
}

void run_seasonal_reps(const ExperimentConfig& cfg, RunRecord& rec) {
  const std::int64_t cap = std::min<std::int64_t>(cfg.tmax_cap, 4095);
  std::vector<std::optional<std::vector<std::int64_t>>> walks(
      rec.reps.size());
  std::int64_t max_t = cfg.n;
  for (std::size_t i = 0; i < rec.reps.size(); ++i) {
    rec.reps[i].index = static_cast<long>(i);
    walks[i] = rep_walk(cfg, cap, rec.reps[i]);
    if (walks[i]) max_t = std::max(max_t, walks[i]->back());
  }
  quad::Config qcfg;
  qcfg.abs_tol = 1e-8;
  CovSeq cov = procgen::gegenbauer_autocov(*cfg.seasonal,
                                           static_cast<long>(max_t), qcfg);
  procgen::ExactGaussianSampler sampler(cov, static_cast<long>(max_t) + 1);
  parallel_for(rec.reps.size(), resolve_threads(cfg.threads),
               [&](std::size_t i) {
    if (!walks[i]) return;
    RepResult& r = rec.reps[i];
    try {
      std::vector<double> x = sampler.draw(r.seed);
      std::vector<double> y(walks[i]->size());
      for (std::size_t j = 0; j < y.size(); ++j)
        y[j] = x[static_cast<std::size_t>((*walks[i])[j])];
      r.d_hat = estimate_d(cfg, y);
      r.ok = true;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  });
}

}  // namespace

RunRecord run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  auto t0 = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.version = kVersion;
  rec.config_echo = cfg.echo;
  rec.reps.resize(static_cast<std::size_t>(cfg.reps));

  if (cfg.seasonal)
    run_seasonal_reps(cfg, rec);
  else
    run_farima_reps(cfg, rec);

  rec.summarize();
  if (!cfg.seasonal)
    rec.predicted = covmap::predict_memory(cfg.model.d, cfg.law);
  rec.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
  if (100 * rec.n_failed > cfg.reps)
    throw numeric_error("experiment failed: more than 1% of replications "
                        "did not complete");
  return rec;
}

void write_run_record(const RunRecord& rec, const std::string& out_dir,
                      const std::string& stem) {
  std::ostringstream meta;
  meta << "lmsamp " << rec.version << " | "
       << "config: " << rec.config_echo.size() << " bytes";
  csvio::Table reps;
  reps.header = {"rep", "ok", "d_hat", "retries"};
  for (const auto& r : rec.reps)
    reps.rows.push_back({static_cast<double>(r.index), r.ok ? 1.0 : 0.0,
                         r.d_hat, static_cast<double>(r.retries)});
  std::string meta_line = meta.str();
  // seed appears in the echoed config; keep it in the metadata line too
  auto seed_pos = rec.config_echo.find("seed");
  if (seed_pos != std::string::npos) {
    auto eol = rec.config_echo.find('\n', seed_pos);
    meta_line += " | " + rec.config_echo.substr(seed_pos, eol - seed_pos);
  }
  csvio::write_csv(out_dir + "/" + stem + "_reps.csv", meta_line, reps);

  csvio::Table summary;
  summary.header = {"mean_d", "sd_d", "band_lo", "band_hi", "n_ok",
                    "n_failed", "d_pred"};
  double d_pred = std::numeric_limits<double>::quiet_NaN();
  if (rec.predicted && rec.predicted->d_out) d_pred = *rec.predicted->d_out;
  summary.rows.push_back({rec.mean_d, rec.sd_d, rec.band_lo, rec.band_hi,
                          static_cast<double>(rec.reps.size()) -
                              static_cast<double>(rec.n_failed),
                          static_cast<double>(rec.n_failed), d_pred});
  csvio::write_csv(out_dir + "/" + stem + "_summary.csv", meta_line, summary);
}

Fig1Output repro_acf_figure(const Fig1Params& p) {
  procgen::FarimaSpec spec = procgen::FarimaSpec::fractional(p.d);
  procgen::MacoeffTable coeffs =
      procgen::farima_ma_coeffs(spec, p.truncation_m);

  // one underlying noise stream: the sampled series are subsequences of the
  // same trajectory the left panel shows the head of
  procgen::Trajectory x = procgen::gen_trajectory_ma(coeffs, p.n, p.seed);
  Fig1Output out;
  out.acf_x = memest::emp_acf(x.values, p.maxlag);

  auto sample_acf = [&](double gamma) {
    auto law = samplaw::SamplingLaw::pareto(gamma);
    auto path = samplaw::walk(law, p.n - 1,
                              derive_seed(p.seed, 0, kTagWalk));
    std::vector<double> y =
        procgen::gen_at_indices(coeffs, path.times, p.seed);
    return memest::emp_acf(y, p.maxlag);
  };
  out.acf_y1 = sample_acf(p.gamma1);
  out.acf_y2 = sample_acf(p.gamma2);

  csvio::Table t;
  t.header = {"lag", "acf_x", "acf_y1", "acf_y2"};
  for (long h = 0; h <= p.maxlag; ++h)
    t.rows.push_back({static_cast<double>(h),
                      out.acf_x.values[static_cast<std::size_t>(h)],
                      out.acf_y1.values[static_cast<std::size_t>(h)],
                      out.acf_y2.values[static_cast<std::size_t>(h)]});
  std::ostringstream meta;
  meta << "lmsamp " << kVersion << " | acf figure | d=" << p.d
       << " gamma1=" << p.gamma1 << " gamma2=" << p.gamma2 << " n=" << p.n
       << " seed=" << p.seed;
  out.csv_path = p.out_dir + "/fig1_acf.csv";
  csvio::write_csv(out.csv_path, meta.str(), t);

  if (p.svg) {
    auto panel = [&](const char* title, const CovSeq& acf) {
      svgio::Panel pn;
      pn.title = title;
      svgio::Series s;
      for (long h = 0; h <= p.maxlag; ++h) {
        s.x.push_back(static_cast<double>(h));
        s.y.push_back(acf.values[static_cast<std::size_t>(h)]);
      }
      pn.series.push_back(std::move(s));
      return pn;
    };
    out.svg_path = p.out_dir + "/fig1_acf.svg";
    svgio::write_chart(out.svg_path,
                       {panel("acf of X", out.acf_x),
                        panel("acf of Y (gamma1)", out.acf_y1),
                        panel("acf of Y (gamma2)", out.acf_y2)});
  }
  return out;
}

Fig2Output repro_dest_figure(const Fig2Params& p) {
  Fig2Output out;
  std::vector<std::pair<double, double>> cells;  // (d, gamma)
  for (double d : p.d_values) {
    for (double g = p.gamma_lo; g <= p.gamma_hi + 1e-9; g += p.gamma_step) {
      double gamma = std::round(g * 1000.0) / 1000.0;
      // feasibility: typical walk span n^{1/(gamma-1)} must fit the cap
      if (gamma <= 2.0) {
        double span = std::pow(static_cast<double>(p.n),
                               1.0 / (gamma - 1.0));
        if (span > 0.5 * static_cast<double>(p.tmax_cap)) continue;
      }
      cells.push_back({d, gamma});
    }
  }
  out.cells.resize(cells.size());

  unsigned threads = resolve_threads(p.threads);
  parallel_for(cells.size(), threads, [&](std::size_t ci) {
    auto [d, gamma] = cells[ci];
    ExperimentConfig cfg;
    cfg.model = procgen::FarimaSpec::fractional(d);
    cfg.law = samplaw::SamplingLaw::pareto(gamma);
    cfg.n = p.n;
    cfg.reps = p.reps;
    cfg.truncation_m = p.truncation_m;
    cfg.tmax_cap = p.tmax_cap;
    cfg.threads = 1;  // cells already run in parallel
    cfg.seed = derive_seed(p.seed, static_cast<std::uint64_t>(ci), 11);
    cfg.estimator = memest::EstimatorKind::Fexp;
    Fig2Cell& cell = out.cells[ci];
    cell.gamma = gamma;
    cell.d_in = d;
    auto pred = covmap::predict_memory(d, cfg.law);
    cell.d_pred = pred.d_out.value_or(0.0);
    try {
      RunRecord rec = run_experiment(cfg);
      cell.d_hat_mean = rec.mean_d;
      cell.band_lo = rec.band_lo;
      cell.band_hi = rec.band_hi;
    } catch (const numeric_error&) {
      // cap exhaustion across most replicates: leave the cell marked failed
      cell.d_hat_mean = std::numeric_limits<double>::quiet_NaN();
      cell.band_lo = cell.band_hi = std::numeric_limits<double>::quiet_NaN();
    }
  });

  csvio::Table t;
  t.header = {"gamma", "d_in", "d_pred", "d_hat_mean", "band_lo", "band_hi"};
  for (const auto& c : out.cells)
    t.rows.push_back(
        {c.gamma, c.d_in, c.d_pred, c.d_hat_mean, c.band_lo, c.band_hi});
  std::ostringstream meta;
  meta << "lmsamp " << kVersion << " | estimation figure | n=" << p.n
       << " reps=" << p.reps << " seed=" << p.seed;
  out.csv_path = p.out_dir + "/fig2_dest.csv";
  csvio::write_csv(out.csv_path, meta.str(), t);

  if (p.svg) {
    svgio::Panel panel;
    panel.title = "estimated memory parameter vs gamma";
    const char* colors[] = {"#1f6fb2", "#b23f1f", "#3fa24e", "#7a3fb2"};
    int ci = 0;
    for (double d : p.d_values) {
      svgio::Series mean, pred, lo, hi;
      mean.label = "d=" + csvio::format_number(d);
      mean.color = colors[ci % 4];
      pred.color = mean.color;
      pred.line = false;
      pred.markers = true;
      lo.color = hi.color = "#999999";
      for (const auto& c : out.cells) {
        if (c.d_in != d) continue;
        mean.x.push_back(c.gamma);
        mean.y.push_back(c.d_hat_mean);
        pred.x.push_back(c.gamma);
        pred.y.push_back(c.d_pred);
        lo.x.push_back(c.gamma);
        lo.y.push_back(c.band_lo);
        hi.x.push_back(c.gamma);
        hi.y.push_back(c.band_hi);
      }
      panel.series.push_back(std::move(lo));
      panel.series.push_back(std::move(hi));
      panel.series.push_back(std::move(mean));
      panel.series.push_back(std::move(pred));
      ++ci;
    }
    out.svg_path = p.out_dir + "/fig2_dest.svg";
    svgio::write_chart(out.svg_path, {panel}, 720, 420);
  }
  return out;
}

}  // namespace lmsamp::xcli
