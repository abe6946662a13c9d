#include "lmsamp/memest.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>

#include "lmsamp/common.hpp"
#include "lmsamp/fft.hpp"

namespace lmsamp::memest {

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<double> centered(std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  double mean = pairwise_sum(out) / static_cast<double>(out.size());
  for (double& v : out) v -= mean;
  return out;
}

}  // namespace

CovSeq emp_acf(std::span<const double> series, long maxlag) {
  const long n = static_cast<long>(series.size());
  if (maxlag < 0 || maxlag >= n)
    throw std::domain_error("emp_acf requires 0 <= maxlag < n");
  std::vector<double> x = centered(series);
  CovSeq cov;
  cov.provenance = CovProvenance::Empirical;
  cov.emp_n = n;
  cov.model = "empirical";
  cov.values.resize(static_cast<std::size_t>(maxlag) + 1);
  for (long h = 0; h <= maxlag; ++h) {
    double s = 0.0;
    for (long t = 0; t + h < n; ++t)
      s += x[static_cast<std::size_t>(t)] *
           x[static_cast<std::size_t>(t + h)];
    cov.values[static_cast<std::size_t>(h)] = s / static_cast<double>(n);
  }
  if (!(cov.values[0] > 0.0))
    throw std::domain_error("degenerate series: zero sample variance");
  return cov;
}

specmap::SpectralGrid periodogram(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 16) throw std::domain_error("periodogram requires n >= 16");
  std::vector<double> x = centered(series);
  auto spec = fft::rfft(x, n);
  specmap::SpectralGrid grid;
  grid.meta = "periodogram(n=" + std::to_string(n) + ")";
  const std::size_t half = n / 2;
  grid.freqs.reserve(half);
  grid.values.reserve(half);
  const double scale = 1.0 / (2.0 * kPi * static_cast<double>(n));
  for (std::size_t j = 1; j <= half; ++j) {
    grid.freqs.push_back(2.0 * kPi * static_cast<double>(j) /
                         static_cast<double>(n));
    grid.values.push_back(std::norm(spec[j]) * scale);
  }
  return grid;
}

namespace {

// -2 log|1 - e^{i lam}| = -2 log(2 sin(lam/2))
double lm_regressor(double lam) {
  return -2.0 * std::log(2.0 * std::sin(0.5 * lam));
}

}  // namespace

EstimateResult gph(std::span<const double> series, long m) {
  const long n = static_cast<long>(series.size());
  auto grid = periodogram(series);
  const long half = static_cast<long>(grid.freqs.size());
  if (m <= 0) m = static_cast<long>(std::floor(std::sqrt(n)));
  if (m < 2 || m > half)
    throw std::domain_error("GPH bandwidth must satisfy 2 <= m <= n/2");
  std::vector<double> xs, ys;
  xs.reserve(static_cast<std::size_t>(m));
  for (long j = 0; j < m; ++j) {
    double ij = grid.values[static_cast<std::size_t>(j)];
    if (!(ij > 0.0)) continue;
    xs.push_back(lm_regressor(grid.freqs[static_cast<std::size_t>(j)]));
    ys.push_back(std::log(ij));
  }
  if (xs.size() < 2)
    throw std::domain_error("GPH: too few positive periodogram ordinates");
  LineFit fit = fit_line(xs, ys);
  EstimateResult r;
  r.method = EstimatorKind::Gph;
  r.n = n;
  r.bandwidth_or_order = m;
  r.d_hat = fit.slope;
  r.std_err = kPi / std::sqrt(24.0 * static_cast<double>(m));
  r.ci95 = {r.d_hat - 1.96 * r.std_err, r.d_hat + 1.96 * r.std_err};
  return r;
}

EstimateResult fexp(std::span<const double> series, long p) {
  const long n = static_cast<long>(series.size());
  auto grid = periodogram(series);
  const long half = static_cast<long>(grid.freqs.size());
  if (p < 0)
    p = std::min<long>(20, static_cast<long>(std::floor(
                               std::log(static_cast<double>(n)))));
  if (p > 20) throw std::domain_error("FEXP order must satisfy 0 <= p <= 20");
  const long cols = p + 2;
  if (half < cols + 2)
    throw std::domain_error("FEXP: series too short for the requested order");

  Eigen::MatrixXd design(half, cols);
  Eigen::VectorXd y(half);
  for (long j = 0; j < half; ++j) {
    double lam = grid.freqs[static_cast<std::size_t>(j)];
    double ij = grid.values[static_cast<std::size_t>(j)];
    y(j) = std::log(std::max(ij, 1e-300));
    design(j, 0) = lm_regressor(lam);
    design(j, 1) = 1.0;
    for (long k = 1; k <= p; ++k)
      design(j, 1 + k) = std::cos(static_cast<double>(k) * lam);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < cols)
    throw numeric_error("FEXP design matrix is rank deficient");
  Eigen::VectorXd beta = qr.solve(y);

  // known log-periodogram error variance pi^2/6
  Eigen::MatrixXd xtx = design.transpose() * design;
  Eigen::MatrixXd xtx_inv = xtx.ldlt().solve(
      Eigen::MatrixXd::Identity(cols, cols));
  double var = kPi * kPi / 6.0 * xtx_inv(0, 0);

  EstimateResult r;
  r.method = EstimatorKind::Fexp;
  r.n = n;
  r.bandwidth_or_order = p;
  r.d_hat = beta(0);
  r.std_err = std::sqrt(std::max(var, 0.0));
  r.ci95 = {r.d_hat - 1.96 * r.std_err, r.d_hat + 1.96 * r.std_err};
  return r;
}

}  // namespace lmsamp::memest
