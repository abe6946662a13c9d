#include "lmsamp/covmap.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lmsamp/common.hpp"
#include "lmsamp/fft.hpp"

namespace lmsamp::covmap {

using samplaw::LawKind;
using samplaw::SamplingLaw;

namespace {
constexpr std::int64_t kSupportBudget = std::int64_t{1} << 25;
}

LagCov farima0d0_cov(double d, double noise_var) {
  if (!(d >= 0.0 && d < 0.5))
    throw std::domain_error("memory parameter must satisfy 0 <= d < 1/2");
  if (!(noise_var > 0.0))
    throw std::domain_error("noise variance must be positive");
  LagCov c;
  if (d == 0.0) {
    c.value = [noise_var](std::int64_t j) {
      return j == 0 ? noise_var : 0.0;
    };
    c.env_c = 0.0;
    c.env_alpha = 1.0;
    c.has_envelope = true;
    return c;
  }
  c.value = [d, noise_var](std::int64_t j) {
    double h = static_cast<double>(std::llabs(j));
    double lg = std::lgamma(1.0 - 2.0 * d) + std::lgamma(h + d) -
                std::lgamma(d) - std::lgamma(1.0 - d) -
                std::lgamma(h + 1.0 - d);
    return noise_var * std::exp(lg);
  };
  // Gamma(h+d)/Gamma(h+1-d) <= h^{2d-1}, so this constant is certified
  c.env_c = noise_var * std::tgamma(1.0 - 2.0 * d) /
            (std::tgamma(d) * std::tgamma(1.0 - d));
  c.env_alpha = 1.0 - 2.0 * d;
  c.has_envelope = true;
  return c;
}

LagCov ar1_cov(double phi, double noise_var) {
  if (!(std::abs(phi) < 1.0))
    throw std::domain_error("AR(1) coefficient must satisfy |phi| < 1");
  LagCov c;
  double scale = noise_var / (1.0 - phi * phi);
  c.value = [phi, scale](std::int64_t j) {
    return scale * std::pow(phi, static_cast<double>(std::llabs(j)));
  };
  // |sigma(j)| <= env_c j^{-3}: the maximum of |phi|^j j^3 is attained well
  // before the scan bound, after which the product is strictly decreasing
  double mx = 0.0;
  std::int64_t bound =
      std::max<std::int64_t>(2000, static_cast<std::int64_t>(
                                       30.0 / std::log(1.0 / std::abs(phi))));
  for (std::int64_t j = 1; j <= bound; ++j)
    mx = std::max(mx, std::pow(std::abs(phi), static_cast<double>(j)) *
                          std::pow(static_cast<double>(j), 3.0));
  c.env_c = scale * mx;
  c.env_alpha = 3.0;
  c.has_envelope = true;
  return c;
}

LagCov power_law_cov(double cc, double alpha) {
  if (!(cc > 0.0) || !(alpha > 0.0))
    throw std::domain_error("power law requires c > 0 and alpha > 0");
  LagCov c;
  c.value = [cc, alpha](std::int64_t j) {
    return j == 0 ? cc : cc * std::pow(static_cast<double>(j), -alpha);
  };
  c.env_c = cc;
  c.env_alpha = alpha;
  c.has_envelope = true;
  return c;
}

namespace {

// initial support guess so that tail_mass * envelope <= tol/4
std::int64_t initial_support(const LagCov& sig, const SamplingLaw& law,
                             std::int64_t h, double tol) {
  if (law.kind() == LawKind::Table)
    return static_cast<std::int64_t>(law.table_pmf().size()) * h;
  double g = law.pareto_gamma();
  double c = std::max(sig.env_c, 1e-300);
  double j0 = std::pow(4.0 * static_cast<double>(h) * c / tol,
                       1.0 / (g - 1.0 + sig.env_alpha));
  return std::max<std::int64_t>(4 * h + 8, static_cast<std::int64_t>(j0));
}

double dot_sigma(const LagCov& sig, const samplaw::PmfTable& table) {
  std::vector<double> terms(table.probs.size());
  for (std::size_t i = 0; i < table.probs.size(); ++i)
    terms[i] = table.probs[i] *
               sig.value(table.min_support + static_cast<std::int64_t>(i));
  return pairwise_sum(terms);
}

}  // namespace

double sampled_cov_exact(const LagCov& sigma_x, const SamplingLaw& law,
                         std::int64_t h, double tol) {
  if (h < 0) throw std::domain_error("lag must be >= 0");
  if (!(tol > 0.0)) throw std::domain_error("tolerance must be positive");
  if (h == 0) return sigma_x.value(0);
  if (law.is_dirac()) return sigma_x.value(law.dirac_k() * h);
  if (law.kind() == LawKind::Table) {
    std::int64_t full = static_cast<std::int64_t>(law.table_pmf().size()) * h;
    if (full > kSupportBudget)
      throw resource_error("sampled_cov_exact: support budget exhausted");
    return dot_sigma(sigma_x, samplaw::convolve_power_capped(law, h, full));
  }
  if (!sigma_x.has_envelope)
    throw std::domain_error(
        "an infinite-support law requires a certified covariance envelope");

  std::int64_t j = initial_support(sigma_x, law, h, tol);
  for (;;) {
    if (j > kSupportBudget)
      throw resource_error("sampled_cov_exact: support budget exhausted");
    samplaw::PmfTable table = samplaw::convolve_power_capped(law, h, j);
    double env = sigma_x.env_c *
                 std::pow(static_cast<double>(table.max_support() + 1),
                          -sigma_x.env_alpha);
    if (table.tail_mass * env <= 0.5 * tol) return dot_sigma(sigma_x, table);
    j *= 2;
  }
}

CovSeq sampled_cov_seq(const LagCov& sigma_x, const SamplingLaw& law,
                       long maxlag, double tol) {
  if (maxlag < 0) throw std::domain_error("maxlag must be >= 0");
  if (!(tol > 0.0)) throw std::domain_error("tolerance must be positive");
  CovSeq out;
  out.provenance = CovProvenance::Exact;
  out.model = "sampled(" + law.to_string() + ")";
  out.values.resize(static_cast<std::size_t>(maxlag) + 1);
  out.values[0] = sigma_x.value(0);
  if (maxlag == 0) return out;

  if (law.is_dirac()) {
    for (long h = 1; h <= maxlag; ++h)
      out.values[static_cast<std::size_t>(h)] =
          sigma_x.value(law.dirac_k() * h);
    return out;
  }
  if (law.kind() == LawKind::ParetoTail && !sigma_x.has_envelope)
    throw std::domain_error(
        "an infinite-support law requires a certified covariance envelope");

  std::int64_t j = initial_support(sigma_x, law, maxlag, tol);
  for (;;) {
    if (j > kSupportBudget)
      throw resource_error("sampled_cov_seq: support budget exhausted");
    const std::size_t len = static_cast<std::size_t>(j) + 1;

    // single-step pmf on absolute indices 0..J (index 0 unused)
    std::vector<double> step(len, 0.0);
    {
      samplaw::PmfTable base = samplaw::convolve_power_capped(law, 1, j);
      for (std::size_t i = 0; i < base.probs.size(); ++i)
        step[static_cast<std::size_t>(base.min_support) + i] = base.probs[i];
    }
    std::vector<double> sigma_tab(len, 0.0);
    for (std::size_t i = 0; i < len; ++i)
      sigma_tab[i] = sigma_x.value(static_cast<std::int64_t>(i));
    const double env_at_j =
        sigma_x.env_c *
        std::pow(static_cast<double>(j + 1), -sigma_x.env_alpha);

    fft::FixedKernelConvolver conv(step, len);
    std::vector<double> cur = step;
    std::vector<double> terms(len);
    bool ok = true;
    for (long h = 1; h <= maxlag; ++h) {
      for (std::size_t i = 0; i < len; ++i) terms[i] = cur[i] * sigma_tab[i];
      double val = pairwise_sum(terms);
      double tail_mass = std::max(0.0, 1.0 - pairwise_sum(cur));
      if (tail_mass * env_at_j > tol) {
        ok = false;
        break;
      }
      out.values[static_cast<std::size_t>(h)] = val;
      if (h < maxlag) {
        conv.apply(cur, cur);
        for (double& x : cur)
          if (x < 0.0) x = 0.0;
      }
    }
    if (ok) return out;
    j *= 2;
  }
}

McResult sampled_cov_mc(const LagCov& sigma_x, const SamplingLaw& law,
                        std::int64_t h, long reps, std::uint64_t seed) {
  if (reps < 100) throw std::domain_error("Monte Carlo needs reps >= 100");
  if (h < 0) throw std::domain_error("lag must be >= 0");
  McResult res;
  res.reps = reps;
  std::vector<double> vals(static_cast<std::size_t>(reps));
  for (long i = 0; i < reps; ++i) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(i),
                                    kTagWalk));
    std::int64_t t = 0;
    for (std::int64_t s = 0; s < h; ++s) t += samplaw::draw(law, rng);
    vals[static_cast<std::size_t>(i)] = sigma_x.value(t);
  }
  MeanSd ms = mean_sd(vals);
  res.mean = ms.mean;
  res.se = ms.sd / std::sqrt(static_cast<double>(reps));
  return res;
}

MemoryPrediction predict_memory(double d, const SamplingLaw& law) {
  if (!(d > 0.0 && d < 0.5))
    throw std::domain_error("memory parameter must lie in (0, 1/2)");
  MemoryPrediction p;
  if (law.kind() != LawKind::ParetoTail || law.pareto_gamma() >= 2.0) {
    // finite mean (or the gamma = 2 boundary): rate preserved
    p.regime = MemoryRegime::Preserved;
    p.d_out = d;
    p.alpha_out = 1.0 - 2.0 * d;
    return p;
  }
  double g = law.pareto_gamma();
  double alpha_y = (1.0 - 2.0 * d) / (g - 1.0);
  if (g >= 2.0 * (1.0 - d)) {
    p.regime = MemoryRegime::Reduced;
    p.d_out = d - 1.0 + 0.5 * g;
    p.alpha_out = alpha_y;
  } else {
    p.regime = MemoryRegime::Short;
    p.d_out = std::nullopt;
    p.alpha_out = alpha_y;
  }
  return p;
}

const char* regime_name(MemoryRegime r) {
  switch (r) {
    case MemoryRegime::Preserved:
      return "preserved";
    case MemoryRegime::Reduced:
      return "reduced";
    case MemoryRegime::Short:
      return "short";
  }
  return "?";
}

DecayFit fit_decay(const CovSeq& cov, long lag_lo, long lag_hi) {
  if (!(lag_lo > 0 && lag_lo < lag_hi &&
        static_cast<std::size_t>(lag_hi) <= cov.max_lag()))
    throw std::domain_error("fit window must satisfy 0 < lo < hi <= maxlag");
  std::vector<double> lx, ly;
  long first = 0, last = 0;
  for (long h = lag_lo; h <= lag_hi; ++h) {
    double v = cov.values[static_cast<std::size_t>(h)];
    if (!(v > 0.0)) continue;  // Monte Carlo noise can cross zero
    if (first == 0) first = h;
    last = h;
    lx.push_back(std::log(static_cast<double>(h)));
    ly.push_back(std::log(v));
  }
  if (lx.size() < 10)
    throw std::domain_error("fewer than 10 usable lags in the fit window");
  LineFit f = fit_line(lx, ly);
  DecayFit out;
  out.alpha_hat = -f.slope;
  out.intercept = f.intercept;
  out.r2 = f.r2;
  out.lag_lo_used = first;
  out.lag_hi_used = last;
  out.n_used = static_cast<long>(lx.size());
  return out;
}

std::vector<double> fini_ratio(double c, double alpha, const SamplingLaw& law,
                               const CovSeq& cov_y,
                               const std::vector<long>& hs) {
  if (!(c > 0.0)) throw std::domain_error("power-law constant must be > 0");
  if (!std::isfinite(samplaw::mean(law)))
    throw std::domain_error("fini_ratio requires a finite-mean law");
  std::vector<double> out;
  out.reserve(hs.size());
  for (long h : hs) {
    if (h < 1 || static_cast<std::size_t>(h) > cov_y.max_lag())
      throw std::domain_error("requested lag outside the covariance range");
    out.push_back(cov_y.values[static_cast<std::size_t>(h)] *
                  std::pow(static_cast<double>(h), alpha) / c);
  }
  return out;
}

}  // namespace lmsamp::covmap
