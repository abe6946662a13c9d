#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lmsamp/covseq.hpp"
#include "lmsamp/procgen.hpp"
#include "lmsamp/quadrature.hpp"
#include "lmsamp/samplaw.hpp"

namespace lmsamp::specmap {

/// Tabulated nonnegative spectral density on increasing frequencies in (0, pi].
struct SpectralGrid {
  std::vector<double> freqs;
  std::vector<double> values;
  std::string meta;
};

/// Singular frequencies of a spectral density, canonicalized to [0, pi]:
/// f ~ c |lambda - freq|^{-2 exponent} near freq.
struct Singularity {
  double freq = 0.0;
  double exponent = 0.0;  // in (0, 1/2)
};

struct SingularitySet {
  std::vector<Singularity> entries;
};

/// Spectral density callable plus its singularity structure (even in lambda).
struct Density {
  std::function<double(double)> f;
  SingularitySet singularities;
};

/// FARIMA spectral density
///   (var/2pi) |B(e^{i lam})/A(e^{i lam})|^2 |1-e^{i lam}|^{-2d}.
/// Throws std::domain_error when lam hits a singular frequency exactly.
double farima_sd(const procgen::FarimaSpec& spec, double lambda);

/// Generalized fractional spectral density (product over seasonal factors
/// times the ARMA factor; single-factor convention at theta in {0, pi}).
double gegenbauer_sd(const procgen::GegenbauerSpec& spec, double lambda);

SingularitySet model_singularities(const procgen::FarimaSpec& spec);
SingularitySet model_singularities(const procgen::GegenbauerSpec& spec);

Density make_density(const procgen::FarimaSpec& spec);
Density make_density(const procgen::GegenbauerSpec& spec);

/// Spectral density of (X_{kn})_n: the k-fold aliasing of f. Even k uses the
/// sign-dependent boundary term with sgn(0) := +1.
double alias_sd(const std::function<double(double)>& f, long k, double lambda);

/// Images of singular frequencies under k-fold decimation: lam* = k lam0
/// wrapped to [-pi, pi) and folded to [0, pi]; coinciding images (within
/// 1e-9) merge keeping the largest exponent.
SingularitySet fold_singularities(const SingularitySet& sings, long k);

/// Estimated memory exponent d from the log-log slope of f near lambda0:
/// fits log f(lambda0 + delta) on log delta and returns -slope/2.
double local_exponent(const std::function<double(double)>& f, double lambda0,
                      const std::vector<double>& offsets);

/// Poisson kernel P_s(t) = (1 - s^2) / (2 pi (1 - 2 s cos t + s^2)), s in [0,1).
double poisson_kernel(double s, double t);

struct KernelEval {
  double r = 0.0;
  double theta = 0.0;
  double value = 0.0;
  double quad_error = 0.0;
  long n_evals = 0;
};

/// g(r, theta) = (1/4) int_{-pi}^{pi} f(lam)
///   (1/pi + P_{r rho(lam)}(tau(lam) - theta) + P_{r rho(lam)}(tau(lam) + theta)) dlam,
/// with rho e^{i tau} the characteristic function of the (non-Dirac) law.
KernelEval g_r_theta(const Density& fx, const samplaw::SamplingLaw& law,
                     double r, double theta, const quad::Config& cfg = {});

/// Default radii 1 - 2^{-j}, j = j_lo..j_hi.
std::vector<double> default_r_seq(int j_lo = 3, int j_hi = 12);

struct SampledSdValue {
  double value = 0.0;        // extrapolated limit
  double last_diff = 0.0;    // magnitude of the last successive difference
  std::vector<double> g_values;
};

/// Spectral density of the sampled process at theta. Extrapolates the
/// r -> 1 limit of g(r, theta) by fitting a + b (1-r)^c on the last points
/// of r_seq; since that limit equals (f_Y(theta) + sigma_X(0)/(2 pi)) / 2,
/// the returned value is 2 lim g - sigma_X(0)/(2 pi), whose Fourier
/// coefficients reproduce the sampled covariances at every lag. Throws
/// numeric_error when the successive differences fail to decrease.
SampledSdValue sampled_sd_limit(const Density& fx,
                                const samplaw::SamplingLaw& law, double theta,
                                const std::vector<double>& r_seq,
                                const quad::Config& cfg = {});

/// f_Y tabulated on a graded Gauss mesh over (0, pi); nodes accumulate
/// dyadically toward 0 where the sampled spectrum may be singular.
struct SampledSdTab {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> values;
  double head_cut = 0.0;       // mesh starts here
  double head_exponent = 0.0;  // fitted local exponent 2d at 0
  double head_coeff = 0.0;     // fitted local coefficient
};

SampledSdTab sampled_sd_tabulate(const Density& fx,
                                 const samplaw::SamplingLaw& law,
                                 const std::vector<double>& r_seq,
                                 const quad::Config& cfg, int grade_levels = 16,
                                 unsigned threads = 1);

/// Fourier coefficients 2 int_0^pi cos(h theta) f_Y(theta) dtheta for
/// h = 0..H from a tabulation (the h-th sampled covariance).
std::vector<double> fourier_from_tab(const SampledSdTab& tab, long H);

/// Evaluates a density on a uniform grid over (0, pi] (CLI export).
SpectralGrid tabulate(const std::function<double(double)>& f, std::size_t n,
                      const std::string& meta);

}  // namespace lmsamp::specmap
