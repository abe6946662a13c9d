#include "lmsamp/procgen.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "lmsamp/common.hpp"
#include "lmsamp/specmap.hpp"

namespace lmsamp::procgen {

namespace {
constexpr double kPi = std::numbers::pi;

// largest root modulus of z^p + c_1 z^{p-1} + ... + c_p (companion matrix)
double max_root_modulus(const std::vector<double>& c) {
  const std::size_t p = c.size();
  if (p == 0) return 0.0;
  if (p == 1) return std::abs(c[0]);
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<long>(p),
                                               static_cast<long>(p));
  for (std::size_t i = 0; i < p; ++i) comp(0, static_cast<long>(i)) = -c[i];
  for (std::size_t i = 1; i < p; ++i)
    comp(static_cast<long>(i), static_cast<long>(i - 1)) = 1.0;
  Eigen::VectorXcd ev = comp.eigenvalues();
  double mx = 0.0;
  for (long i = 0; i < ev.size(); ++i) mx = std::max(mx, std::abs(ev[i]));
  return mx;
}

}  // namespace

void FarimaSpec::validate() const {
  if (!(d >= 0.0 && d < 0.5))
    throw std::domain_error("FARIMA memory parameter must satisfy 0 <= d < 1/2");
  if (!(noise_var > 0.0))
    throw std::domain_error("noise variance must be positive");
  if (max_root_modulus(ar) >= 1.0 - 1e-8)
    throw std::domain_error("AR polynomial is not stable");
  if (max_root_modulus(ma) >= 1.0 - 1e-8)
    throw std::domain_error("MA polynomial is not invertible");
}

std::string FarimaSpec::describe() const {
  std::ostringstream os;
  os << "farima(" << ar.size() << "," << d << "," << ma.size() << ")";
  return os.str();
}

void GegenbauerSpec::validate() const {
  for (const auto& c : components) {
    if (!(c.theta >= 0.0 && c.theta <= kPi))
      throw std::domain_error("seasonal frequency must lie in [0, pi]");
    if (!(c.d > 0.0 && c.d < 0.5))
      throw std::domain_error("seasonal exponent must lie in (0, 1/2)");
  }
  for (std::size_t i = 0; i < components.size(); ++i)
    for (std::size_t j = i + 1; j < components.size(); ++j)
      if (std::abs(components[i].theta - components[j].theta) < 1e-9)
        throw std::domain_error("seasonal frequencies must be distinct");
  if (arma) {
    arma->validate();
    if (arma->d != 0.0)
      throw std::domain_error("ARMA factor of a seasonal model must have d=0");
  }
}

std::string GegenbauerSpec::describe() const {
  std::ostringstream os;
  os << "gegenbauer[";
  for (std::size_t i = 0; i < components.size(); ++i)
    os << (i ? ";" : "") << components[i].theta << ":" << components[i].d;
  os << "]";
  return os.str();
}

MacoeffTable frac_ma_coeffs(double d, long m) {
  if (!(d >= 0.0 && d < 0.5))
    throw std::domain_error("fractional exponent must satisfy 0 <= d < 1/2");
  if (m < 0) throw std::domain_error("truncation order must be >= 0");
  MacoeffTable t;
  t.truncation_m = m;
  t.coeffs.resize(static_cast<std::size_t>(m) + 1);
  t.coeffs[0] = 1.0;
  for (long j = 1; j <= m; ++j)
    t.coeffs[static_cast<std::size_t>(j)] =
        t.coeffs[static_cast<std::size_t>(j - 1)] *
        (static_cast<double>(j) - 1.0 + d) / static_cast<double>(j);
  if (d > 0.0) {
    // psi_j <= j^{d-1}/Gamma(d), so sum_{j>m} psi_j^2 <= m^{2d-1}/((1-2d) G^2)
    double g = std::tgamma(d);
    t.tail_bound = std::pow(static_cast<double>(std::max(m, 1L)), 2.0 * d - 1.0) /
                   ((1.0 - 2.0 * d) * g * g);
  }
  return t;
}

MacoeffTable farima_ma_coeffs(const FarimaSpec& spec, long m) {
  spec.validate();
  MacoeffTable frac = frac_ma_coeffs(spec.d, m);
  frac.noise_var = spec.noise_var;
  if (spec.ar.empty() && spec.ma.empty()) return frac;

  // impulse response of B(L)/A(L) by long division
  std::vector<double> h(static_cast<std::size_t>(m) + 1, 0.0);
  const auto p = spec.ar.size(), q = spec.ma.size();
  for (std::size_t t = 0; t <= static_cast<std::size_t>(m); ++t) {
    double v = (t == 0) ? 1.0 : (t <= q ? spec.ma[t - 1] : 0.0);
    for (std::size_t k = 1; k <= std::min<std::size_t>(p, t); ++k)
      v -= spec.ar[k - 1] * h[t - k];
    h[t] = v;
  }
  MacoeffTable out;
  out.truncation_m = m;
  out.noise_var = spec.noise_var;
  out.coeffs.assign(static_cast<std::size_t>(m) + 1, 0.0);
  for (std::size_t t = 0; t <= static_cast<std::size_t>(m); ++t) {
    if (h[t] == 0.0) continue;
    for (std::size_t j = 0; t + j <= static_cast<std::size_t>(m); ++j)
      out.coeffs[t + j] += h[t] * frac.coeffs[j];
  }
  double habs = 0.0;
  for (double v : h) habs += std::abs(v);
  out.tail_bound = frac.tail_bound * habs * habs;
  return out;
}

CovSeq farima_autocov(const FarimaSpec& spec, long maxlag, long m) {
  spec.validate();
  if (maxlag < 0) throw std::domain_error("maxlag must be >= 0");
  CovSeq cov;
  cov.provenance = CovProvenance::Exact;
  cov.model = spec.describe();
  cov.values.resize(static_cast<std::size_t>(maxlag) + 1);
  if (spec.ar.empty() && spec.ma.empty()) {
    if (spec.d == 0.0) {
      std::fill(cov.values.begin(), cov.values.end(), 0.0);
      cov.values[0] = spec.noise_var;
      return cov;
    }
    double g1 = std::lgamma(1.0 - 2.0 * spec.d);
    double g2 = std::lgamma(1.0 - spec.d);
    cov.values[0] = spec.noise_var * std::exp(g1 - 2.0 * g2);
    for (long h = 0; h < maxlag; ++h)
      cov.values[static_cast<std::size_t>(h) + 1] =
          cov.values[static_cast<std::size_t>(h)] *
          (static_cast<double>(h) + spec.d) /
          (static_cast<double>(h) + 1.0 - spec.d);
    return cov;
  }
  MacoeffTable t = farima_ma_coeffs(spec, m);
  const auto& psi = t.coeffs;
  for (long h = 0; h <= maxlag; ++h) {
    double s = 0.0;
    for (std::size_t j = 0; j + static_cast<std::size_t>(h) < psi.size(); ++j)
      s += psi[j] * psi[j + static_cast<std::size_t>(h)];
    cov.values[static_cast<std::size_t>(h)] = spec.noise_var * s;
  }
  return cov;
}

CovSeq gegenbauer_autocov(const GegenbauerSpec& spec, long maxlag,
                          const quad::Config& cfg) {
  spec.validate();
  if (maxlag < 0) throw std::domain_error("maxlag must be >= 0");
  auto sings = specmap::model_singularities(spec);
  std::vector<std::pair<double, double>> sp;
  for (const auto& e : sings.entries) sp.push_back({e.freq, 2.0 * e.exponent});
  CovSeq cov;
  cov.provenance = CovProvenance::Exact;
  cov.model = spec.describe();
  cov.values.resize(static_cast<std::size_t>(maxlag) + 1);
  auto panels = quad::make_panels(0.0, kPi, sp, {});
  for (long h = 0; h <= maxlag; ++h) {
    quad::Config c = cfg;
    c.min_pieces = std::max(cfg.min_pieces, static_cast<int>(h / 2) + 2);
    auto integrand = [&](double lam) {
      return std::cos(static_cast<double>(h) * lam) *
             specmap::gegenbauer_sd(spec, lam);
    };
    quad::Result r = quad::integrate_panels(integrand, panels, c);
    if (r.err_est > 50.0 * cfg.abs_tol)
      throw numeric_error("gegenbauer_autocov: quadrature did not converge "
                          "(err=" + std::to_string(r.err_est) + ")");
    cov.values[static_cast<std::size_t>(h)] = 2.0 * r.value;
  }
  return cov;
}

namespace {

// shared by the dense and sparse generators so both produce bit-identical
// values: one sequential N(0, var) stream and the same dot-product order
struct NoiseStream {
  std::mt19937_64 rng;
  std::normal_distribution<double> normal;
  double scale;
  explicit NoiseStream(std::uint64_t seed, double var)
      : rng(derive_seed(seed, 0, kTagNoise)), normal(0.0, 1.0),
        scale(std::sqrt(var)) {}
  double next() { return scale * normal(rng); }
};

double dot_psi(const std::vector<double>& psi, const std::vector<double>& eps,
               std::size_t ring, std::size_t t_ring) {
  // X_t = sum_{j=0..m} psi_j eps_{t-j}; eps stored in a ring of size m+1
  double acc = 0.0;
  std::size_t idx = t_ring;
  for (std::size_t j = 0; j < psi.size(); ++j) {
    acc += psi[j] * eps[idx];
    idx = (idx == 0) ? ring - 1 : idx - 1;
  }
  return acc;
}

}  // namespace

Trajectory gen_trajectory_ma(const MacoeffTable& coeffs, long n,
                             std::uint64_t seed) {
  if (n < 1) throw std::domain_error("trajectory length must be >= 1");
  const auto& psi = coeffs.coeffs;
  const std::size_t ring = psi.size();
  Trajectory tr;
  tr.seed = seed;
  tr.model_id = "ma(m=" + std::to_string(coeffs.truncation_m) + ")";
  tr.values.resize(static_cast<std::size_t>(n));
  NoiseStream noise(seed, coeffs.noise_var);
  std::vector<double> eps(ring, 0.0);
  // burn-in: fill eps_{-m}..eps_{-1}
  for (std::size_t t = 0; t + 1 < ring; ++t)
    eps[t % ring] = noise.next();
  std::size_t pos = ring - 1;
  for (long t = 0; t < n; ++t) {
    eps[pos] = noise.next();
    tr.values[static_cast<std::size_t>(t)] = dot_psi(psi, eps, ring, pos);
    pos = (pos + 1 == ring) ? 0 : pos + 1;
  }
  return tr;
}

std::vector<double> gen_at_indices(const MacoeffTable& coeffs,
                                   const std::vector<std::int64_t>& indices,
                                   std::uint64_t seed) {
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 0)
      throw std::domain_error("indices must be >= 0");
    if (i > 0 && indices[i] <= indices[i - 1])
      throw std::domain_error("indices must be strictly increasing");
  }
  const auto& psi = coeffs.coeffs;
  const std::size_t ring = psi.size();
  std::vector<double> out(indices.size());
  if (indices.empty()) return out;
  NoiseStream noise(seed, coeffs.noise_var);
  std::vector<double> eps(ring, 0.0);
  for (std::size_t t = 0; t + 1 < ring; ++t) eps[t % ring] = noise.next();
  std::size_t pos = ring - 1;
  std::size_t next_out = 0;
  for (std::int64_t t = 0; next_out < indices.size(); ++t) {
    eps[pos] = noise.next();
    if (t == indices[next_out]) {
      out[next_out] = dot_psi(psi, eps, ring, pos);
      ++next_out;
    }
    pos = (pos + 1 == ring) ? 0 : pos + 1;
  }
  return out;
}

struct ExactGaussianSampler::Impl {
  Eigen::MatrixXd chol;
  long n = 0;
  std::string model;
};

ExactGaussianSampler::ExactGaussianSampler(const CovSeq& cov, long n)
    : impl_(std::make_unique<Impl>()) {
  if (n < 1) throw std::domain_error("trajectory length must be >= 1");
  if (n > 4096)
    throw std::domain_error("exact sampler is capped at n = 4096");
  if (static_cast<std::size_t>(n) > cov.values.size())
    throw std::domain_error("covariance sequence shorter than n");
  Eigen::MatrixXd sigma(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j)
      sigma(i, j) = cov.values[static_cast<std::size_t>(std::abs(i - j))];
  sigma.diagonal().array() += 1e-10;
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw std::domain_error(
        "covariance is not positive semidefinite (Cholesky failed)");
  impl_->chol = llt.matrixL();
  impl_->n = n;
  impl_->model = cov.model;
}

ExactGaussianSampler::~ExactGaussianSampler() = default;
ExactGaussianSampler::ExactGaussianSampler(ExactGaussianSampler&&) noexcept =
    default;
ExactGaussianSampler& ExactGaussianSampler::operator=(
    ExactGaussianSampler&&) noexcept = default;

long ExactGaussianSampler::size() const { return impl_->n; }
std::string ExactGaussianSampler::model() const { return impl_->model; }

std::vector<double> ExactGaussianSampler::draw(std::uint64_t seed) const {
  NoiseStream noise(seed, 1.0);
  Eigen::VectorXd z(impl_->n);
  for (long i = 0; i < impl_->n; ++i) z(i) = noise.next();
  Eigen::VectorXd x = impl_->chol.triangularView<Eigen::Lower>() * z;
  std::vector<double> out(x.data(), x.data() + impl_->n);
  return out;
}

Trajectory gen_trajectory_exact(const CovSeq& cov, long n,
                                std::uint64_t seed) {
  ExactGaussianSampler sampler(cov, n);
  Trajectory tr;
  tr.seed = seed;
  tr.model_id = "exact(" + cov.model + ")";
  tr.values = sampler.draw(seed);
  return tr;
}

}  // namespace lmsamp::procgen
