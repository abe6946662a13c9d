#pragma once

#include <span>
#include <utility>

#include "lmsamp/covseq.hpp"
#include "lmsamp/specmap.hpp"

namespace lmsamp::memest {

enum class EstimatorKind { Gph, Fexp };

struct EstimateResult {
  double d_hat = 0.0;
  double std_err = 0.0;
  std::pair<double, double> ci95{0.0, 0.0};
  EstimatorKind method = EstimatorKind::Gph;
  long bandwidth_or_order = 0;
  long n = 0;
};

/// Biased sample autocovariance (1/n) sum (x_t - xbar)(x_{t+h} - xbar).
CovSeq emp_acf(std::span<const double> series, long maxlag);

/// Periodogram I(lam_j) = |sum x_t e^{-it lam_j}|^2 / (2 pi n) at Fourier
/// frequencies lam_j = 2 pi j / n, j = 1..n/2, after mean removal.
specmap::SpectralGrid periodogram(std::span<const double> series);

/// Log-periodogram (GPH) regression of log I(lam_j) on
/// -2 log|1-e^{i lam_j}| over j = 1..m; std_err = pi / sqrt(24 m).
/// m <= 0 selects the default floor(sqrt(n)).
EstimateResult gph(std::span<const double> series, long m = 0);

/// FEXP regression over all Fourier frequencies with regressors
/// {-2 log|1-e^{i lam_j}|, 1, cos(lam_j), ..., cos(p lam_j)}; the error
/// variance pi^2/6 of the log-periodogram is used for the standard error.
/// p < 0 selects the default floor(log n) (capped at 20).
EstimateResult fexp(std::span<const double> series, long p = -1);

}  // namespace lmsamp::memest
