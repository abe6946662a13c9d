// lmsamp command line: simulation, sampling, spectra and estimation for
// long-memory processes observed along random walks.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "lmsamp/common.hpp"
#include "lmsamp/covmap.hpp"
#include "lmsamp/csv.hpp"
#include "lmsamp/experiment.hpp"
#include "lmsamp/memest.hpp"
#include "lmsamp/procgen.hpp"
#include "lmsamp/samplaw.hpp"
#include "lmsamp/specmap.hpp"

namespace {

using namespace lmsamp;

struct GlobalOpts {
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out_dir = ".";
  // CSV is always written; "svg" additionally renders charts for the
  // figure subcommands, "csv" suppresses them.
  std::string format = "svg";
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

procgen::GegenbauerSpec parse_seasonal(const std::string& text) {
  // "theta:d;theta:d" with theta given in multiples of pi (e.g. "0.25:0.3")
  procgen::GegenbauerSpec spec;
  std::stringstream ss(text);
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
  spec.validate();
  return spec;
}

std::string meta_line(const GlobalOpts& g, const std::string& what) {
  std::ostringstream os;
  os << "lmsamp " << kVersion << " | " << what << " | seed=" << g.seed;
  return os.str();
}

void ensure_out_dir(const GlobalOpts& g) {
  std::filesystem::create_directories(g.out_dir);
}

int cmd_simulate(const GlobalOpts& g, double d, const std::string& ar,
                 const std::string& ma, double var, long n, long m,
                 const std::string& name) {
  procgen::FarimaSpec spec;
  spec.d = d;
  spec.ar = parse_list(ar);
  spec.ma = parse_list(ma);
  spec.noise_var = var;
  spec.validate();
  auto coeffs = procgen::farima_ma_coeffs(spec, m);
  auto traj = procgen::gen_trajectory_ma(coeffs, n, g.seed);
  csvio::Table t;
  t.header = {"t", "x"};
  for (long i = 0; i < n; ++i)
    t.rows.push_back({static_cast<double>(i),
                      traj.values[static_cast<std::size_t>(i)]});
  ensure_out_dir(g);
  std::string path = g.out_dir + "/" + name;
  csvio::write_csv(path, meta_line(g, "trajectory " + spec.describe()), t);
  std::printf("wrote %s (n=%ld)\n", path.c_str(), n);
  return 0;
}

int cmd_sample(const GlobalOpts& g, const std::string& law_text, long n,
               double d, double var, long m, bool with_series,
               const std::string& name) {
  auto law = samplaw::SamplingLaw::parse(law_text);
  auto path = samplaw::walk(law, n, derive_seed(g.seed, 0, kTagWalk));
  csvio::Table t;
  std::vector<double> y;
  if (with_series) {
    procgen::FarimaSpec spec = procgen::FarimaSpec::fractional(d, var);
    auto coeffs = procgen::farima_ma_coeffs(spec, m);
    y = procgen::gen_at_indices(coeffs, path.times, g.seed);
    t.header = {"n", "t_n", "y"};
  } else {
    t.header = {"n", "t_n"};
  }
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    std::vector<double> row{static_cast<double>(i),
                            static_cast<double>(path.times[i])};
    if (with_series) row.push_back(y[i]);
    t.rows.push_back(std::move(row));
  }
  ensure_out_dir(g);
  std::string out = g.out_dir + "/" + name;
  csvio::write_csv(out, meta_line(g, "walk " + law.to_string()), t);
  std::printf("wrote %s (n=%ld, span=%lld)\n", out.c_str(), n,
              static_cast<long long>(path.times.back()));
  return 0;
}

int cmd_acf(const GlobalOpts& g, const std::string& input, long maxlag,
            const std::string& name) {
  auto series = csvio::read_last_column(input);
  auto acf = memest::emp_acf(series, maxlag);
  csvio::Table t;
  t.header = {"lag", "acf"};
  for (std::size_t h = 0; h < acf.values.size(); ++h)
    t.rows.push_back({static_cast<double>(h), acf.values[h]});
  ensure_out_dir(g);
  std::string out = g.out_dir + "/" + name;
  csvio::write_csv(out, meta_line(g, "empirical acf of " + input), t);
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int cmd_estimate(const std::string& input, const std::string& method,
                 long param) {
  auto series = csvio::read_last_column(input);
  memest::EstimateResult r = method == "gph" ? memest::gph(series, param)
                                             : memest::fexp(series, param);
  std::printf("%s: d_hat = %.6f  stderr = %.6f  ci95 = [%.6f, %.6f]  "
              "(n=%ld, %s=%ld)\n",
              method.c_str(), r.d_hat, r.std_err, r.ci95.first, r.ci95.second,
              r.n, method == "gph" ? "m" : "p", r.bandwidth_or_order);
  return 0;
}

int cmd_predict(double d, const std::string& law_text) {
  auto law = samplaw::SamplingLaw::parse(law_text);
  auto p = covmap::predict_memory(d, law);
  switch (p.regime) {
    case covmap::MemoryRegime::Preserved:
      std::printf("preserved, d_Y = %.2f\n", *p.d_out);
      break;
    case covmap::MemoryRegime::Reduced:
      std::printf("reduced, d_Y = %.2f\n", *p.d_out);
      break;
    case covmap::MemoryRegime::Short:
      std::printf("short, d_Y = none (decay exponent %.3f > 1)\n",
                  *p.alpha_out);
      break;
  }
  return 0;
}

int cmd_spectral(const GlobalOpts& g, const std::string& kind, double d,
                 double var, const std::string& seasonal, long k,
                 const std::string& law_text, long grid_n,
                 const std::string& name) {
  specmap::Density density;
  std::string what;
  if (!seasonal.empty()) {
    auto spec = parse_seasonal(seasonal);
    density = specmap::make_density(spec);
    what = spec.describe();
  } else {
    auto spec = procgen::FarimaSpec::fractional(d, var);
    density = specmap::make_density(spec);
    what = spec.describe();
  }
  specmap::SpectralGrid grid;
  if (kind == "model") {
    grid = specmap::tabulate(density.f, grid_n, what);
  } else if (kind == "alias") {
    auto f = density.f;
    grid = specmap::tabulate(
        [f, k](double lam) { return specmap::alias_sd(f, k, lam); }, grid_n,
        what + " decimated k=" + std::to_string(k));
  } else if (kind == "sampled") {
    auto law = samplaw::SamplingLaw::parse(law_text);
    auto r_seq = specmap::default_r_seq();
    quad::Config cfg;
    cfg.abs_tol = 1e-7;
    grid.meta = what + " sampled by " + law.to_string();
    for (long i = 1; i <= grid_n; ++i) {
      double theta = std::numbers::pi * static_cast<double>(i) /
                     static_cast<double>(grid_n + 1);
      grid.freqs.push_back(theta);
      grid.values.push_back(
          specmap::sampled_sd_limit(density, law, theta, r_seq, cfg).value);
    }
  } else {
    throw std::domain_error("spectral kind must be model, alias or sampled");
  }
  csvio::Table t;
  t.header = {"freq", "value"};
  for (std::size_t i = 0; i < grid.freqs.size(); ++i)
    t.rows.push_back({grid.freqs[i], grid.values[i]});
  ensure_out_dir(g);
  std::string out = g.out_dir + "/" + name;
  csvio::write_csv(out, meta_line(g, "spectral " + grid.meta), t);
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int cmd_experiment(const GlobalOpts& g, const std::string& config_path) {
  xcli::ExperimentConfig cfg = xcli::ExperimentConfig::from_file(config_path);
  if (cfg.out_dir == ".") cfg.out_dir = g.out_dir;
  if (cfg.threads == 0) cfg.threads = g.threads;
  ensure_out_dir(g);
  xcli::RunRecord rec = xcli::run_experiment(cfg);
  xcli::write_run_record(rec, cfg.out_dir, "experiment");
  std::printf("experiment: mean d_hat = %.4f (sd %.4f, band [%.4f, %.4f]), "
              "%ld/%ld ok",
              rec.mean_d, rec.sd_d, rec.band_lo, rec.band_hi,
              static_cast<long>(rec.reps.size()) - rec.n_failed,
              static_cast<long>(rec.reps.size()));
  if (rec.predicted) {
    std::printf(", predicted %s", covmap::regime_name(rec.predicted->regime));
    if (rec.predicted->d_out) std::printf(" (d_Y = %.3f)", *rec.predicted->d_out);
  }
  std::printf(", %.1fs\n", rec.wall_seconds);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random sampling of long-memory stationary processes"};
  app.require_subcommand(1);
  GlobalOpts g;
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--threads", g.threads,
                 "worker threads (0 = LMSAMP_THREADS or all cores)");
  app.add_option("--out-dir", g.out_dir, "output directory");
  app.add_option("--format", g.format)
      ->check(CLI::IsMember({"csv", "svg"}));

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a FARIMA trajectory");
  double sim_d = 0.35, sim_var = 1.0;
  std::string sim_ar, sim_ma, sim_out = "trajectory.csv";
  long sim_n = 10000, sim_m = 5000;
  sim->add_option("--d", sim_d);
  sim->add_option("--ar", sim_ar, "comma list a1,a2,...");
  sim->add_option("--ma", sim_ma, "comma list b1,b2,...");
  sim->add_option("--var", sim_var);
  sim->add_option("--n", sim_n);
  sim->add_option("--m", sim_m, "MA truncation order");
  sim->add_option("--out", sim_out);

  // sample
  auto* smp = app.add_subcommand(
      "sample", "random sampling walk (and optionally the sampled series)");
  std::string smp_law = "pareto:2.8", smp_out = "sample.csv";
  long smp_n = 5000, smp_m = 5000;
  double smp_d = -1.0, smp_var = 1.0;
  smp->add_option("--law", smp_law);
  smp->add_option("--n", smp_n);
  smp->add_option("--d", smp_d, "when set, also emit Y = X_{T_n}");
  smp->add_option("--var", smp_var);
  smp->add_option("--m", smp_m);
  smp->add_option("--out", smp_out);

  // acf
  auto* acf = app.add_subcommand("acf", "empirical autocovariance");
  std::string acf_in, acf_out = "acf.csv";
  long acf_maxlag = 200;
  acf->add_option("--input", acf_in)->required();
  acf->add_option("--maxlag", acf_maxlag);
  acf->add_option("--out", acf_out);

  // estimate
  auto* est = app.add_subcommand("estimate", "memory parameter estimation");
  std::string est_in, est_method = "fexp";
  long est_param = -1;
  est->add_option("--input", est_in)->required();
  est->add_option("--method", est_method)
      ->check(CLI::IsMember({"gph", "fexp"}));
  est->add_option("--param", est_param, "m for gph, p for fexp");

  // spectral
  auto* spc = app.add_subcommand("spectral", "spectral density grids");
  std::string spc_kind = "model", spc_seasonal, spc_law = "pareto:2.8",
              spc_out = "spectrum.csv";
  double spc_d = 0.35, spc_var = 1.0;
  long spc_k = 3, spc_grid = 512;
  spc->add_option("--kind", spc_kind)
      ->check(CLI::IsMember({"model", "alias", "sampled"}));
  spc->add_option("--d", spc_d);
  spc->add_option("--var", spc_var);
  spc->add_option("--seasonal", spc_seasonal,
                  "components theta_over_pi:d;...");
  spc->add_option("--k", spc_k, "decimation factor for kind=alias");
  spc->add_option("--law", spc_law, "sampling law for kind=sampled");
  spc->add_option("--grid", spc_grid);
  spc->add_option("--out", spc_out);

  // predict
  auto* prd = app.add_subcommand("predict", "post-sampling memory regime");
  double prd_d = 0.35;
  std::string prd_law = "pareto:2.8";
  prd->add_option("--d", prd_d)->required();
  prd->add_option("--law", prd_law)->required();

  // experiment
  auto* exp = app.add_subcommand("experiment", "replicated estimation run");
  std::string exp_config;
  exp->add_option("--config", exp_config)->required();

  // figure reproductions
  auto* f1 = app.add_subcommand("repro-fig1", "ACF comparison figure");
  xcli::Fig1Params f1p;
  f1->add_option("--d", f1p.d);
  f1->add_option("--gamma1", f1p.gamma1);
  f1->add_option("--gamma2", f1p.gamma2);
  f1->add_option("--n", f1p.n);
  f1->add_option("--maxlag", f1p.maxlag);

  auto* f2 = app.add_subcommand("repro-fig2",
                                "estimated d against gamma figure");
  xcli::Fig2Params f2p;
  f2->add_option("--n", f2p.n);
  f2->add_option("--reps", f2p.reps);
  f2->add_option("--gamma-lo", f2p.gamma_lo);
  f2->add_option("--gamma-hi", f2p.gamma_hi);
  f2->add_option("--gamma-step", f2p.gamma_step);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed())
      return cmd_simulate(g, sim_d, sim_ar, sim_ma, sim_var, sim_n, sim_m,
                          sim_out);
    if (smp->parsed())
      return cmd_sample(g, smp_law, smp_n, smp_d, smp_var, smp_m,
                        smp_d >= 0.0, smp_out);
    if (acf->parsed()) return cmd_acf(g, acf_in, acf_maxlag, acf_out);
    if (est->parsed()) return cmd_estimate(est_in, est_method, est_param);
    if (prd->parsed()) return cmd_predict(prd_d, prd_law);
    if (spc->parsed())
      return cmd_spectral(g, spc_kind, spc_d, spc_var, spc_seasonal, spc_k,
                          spc_law, spc_grid, spc_out);
    if (exp->parsed()) return cmd_experiment(g, exp_config);
    if (f1->parsed()) {
      f1p.seed = g.seed;
      f1p.out_dir = g.out_dir;
      f1p.svg = g.format == "svg";
      ensure_out_dir(g);
      auto out = xcli::repro_acf_figure(f1p);
      std::printf("wrote %s%s%s\n", out.csv_path.c_str(),
                  out.svg_path.empty() ? "" : " and ", out.svg_path.c_str());
      return 0;
    }
    if (f2->parsed()) {
      f2p.seed = g.seed;
      f2p.out_dir = g.out_dir;
      f2p.svg = g.format == "svg";
      f2p.threads = g.threads;
      ensure_out_dir(g);
      auto out = xcli::repro_dest_figure(f2p);
      std::printf("wrote %s%s%s\n", out.csv_path.c_str(),
                  out.svg_path.empty() ? "" : " and ", out.svg_path.c_str());
      return 0;
    }
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
