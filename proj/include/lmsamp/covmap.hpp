#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "lmsamp/covseq.hpp"
#include "lmsamp/samplaw.hpp"

namespace lmsamp::covmap {

/// Input covariance sequence of the original process: a lag callable plus a
/// certified power-law envelope |sigma(j)| <= env_c j^{-env_alpha} (j >= 1)
/// used to control truncation tails.
struct LagCov {
  std::function<double(std::int64_t)> value;
  double env_c = 0.0;
  double env_alpha = 0.0;
  bool has_envelope = false;
};

/// FARIMA(0,d,0) covariance; the envelope constant
/// noise_var Gamma(1-2d)/(Gamma(d) Gamma(1-d)) is exact for all j >= 1.
LagCov farima0d0_cov(double d, double noise_var = 1.0);

/// AR(1) covariance sigma(j) = noise_var phi^j / (1 - phi^2).
LagCov ar1_cov(double phi, double noise_var = 1.0);

/// Pure power law sigma(0) = c, sigma(j) = c j^{-alpha}.
LagCov power_law_cov(double c, double alpha);

/// sigma_Y(h) = E sigma_X(T_h) = sum_j sigma_X(j) S^{*h}(j), with the
/// truncation tail certified below tol by the envelope. Exact for Dirac laws.
double sampled_cov_exact(const LagCov& sigma_x,
                         const samplaw::SamplingLaw& law, std::int64_t h,
                         double tol);

/// All lags 0..H at once; the convolution powers are advanced incrementally
/// (one FFT pass per lag), far cheaper than H independent calls.
CovSeq sampled_cov_seq(const LagCov& sigma_x, const samplaw::SamplingLaw& law,
                       long maxlag, double tol);

struct McResult {
  double mean = 0.0;
  double se = 0.0;
  long reps = 0;
};

/// Monte Carlo average of sigma_X(T_h) over independent walks.
McResult sampled_cov_mc(const LagCov& sigma_x,
                        const samplaw::SamplingLaw& law, std::int64_t h,
                        long reps, std::uint64_t seed);

enum class MemoryRegime { Preserved, Reduced, Short };

/// Post-sampling memory regime for a FARIMA-type input with parameter d.
/// alpha_out is the covariance decay exponent: 1-2d when the mean sampling
/// interval is finite, (1-2d)/(gamma-1) for heavy-tailed Pareto laws.
struct MemoryPrediction {
  MemoryRegime regime = MemoryRegime::Preserved;
  std::optional<double> d_out;
  std::optional<double> alpha_out;
};

MemoryPrediction predict_memory(double d, const samplaw::SamplingLaw& law);

const char* regime_name(MemoryRegime r);

struct DecayFit {
  double alpha_hat = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  long lag_lo_used = 0;
  long lag_hi_used = 0;
  long n_used = 0;
};

/// Least-squares slope of log sigma(h) against log h over [lag_lo, lag_hi];
/// non-positive values are dropped and the effective window reported.
DecayFit fit_decay(const CovSeq& cov, long lag_lo, long lag_hi);

/// sigma_Y(h) h^alpha / c for each requested lag; approaches
/// mean(law)^{-alpha} when sigma_X(h) = c h^{-alpha} (finite-mean laws only).
std::vector<double> fini_ratio(double c, double alpha,
                               const samplaw::SamplingLaw& law,
                               const CovSeq& cov_y,
                               const std::vector<long>& hs);

}  // namespace lmsamp::covmap
