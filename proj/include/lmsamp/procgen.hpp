#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lmsamp/covseq.hpp"
#include "lmsamp/quadrature.hpp"

namespace lmsamp::procgen {

/// FARIMA(p, d, q) model: A(L) X = B(L) (I-L)^{-d} eps, with
/// A(z) = 1 + a_1 z + ... + a_p z^p and B(z) = 1 + b_1 z + ... + b_q z^q.
/// Stationarity/invertibility: the monic reversed polynomials must have all
/// roots of modulus < 1 - 1e-8.
struct FarimaSpec {
  std::vector<double> ar;
  std::vector<double> ma;
  double d = 0.0;
  double noise_var = 1.0;

  /// Throws std::domain_error when a field is out of range or a polynomial
  /// is (numerically) unstable.
  void validate() const;

  static FarimaSpec fractional(double d, double noise_var = 1.0) {
    FarimaSpec s;
    s.d = d;
    s.noise_var = noise_var;
    s.validate();
    return s;
  }

  std::string describe() const;
};

/// Generalized fractional (seasonal long-memory) model. Each component
/// contributes a spectral factor |e^{i lam}-e^{i theta}|^{-2d}
/// |e^{i lam}-e^{-i theta}|^{-2d}; at theta in {0, pi} the single-factor
/// convention |e^{i lam}-e^{i theta}|^{-2d} is used so the FARIMA case is
/// exactly theta = 0.
struct GegenbauerComponent {
  double theta = 0.0;  // in [0, pi]
  double d = 0.0;      // in (0, 1/2)
};

struct GegenbauerSpec {
  std::vector<GegenbauerComponent> components;
  std::optional<FarimaSpec> arma;  // d must be 0 when present

  void validate() const;
  std::string describe() const;
};

/// Truncated moving-average representation psi_0..psi_m together with a bound
/// on the variance contribution of the neglected coefficients.
struct MacoeffTable {
  std::vector<double> coeffs;
  long truncation_m = 0;
  double tail_bound = 0.0;
  double noise_var = 1.0;  // innovation variance the table was built for
};

/// Gaussian trajectory.
struct Trajectory {
  std::vector<double> values;
  std::string model_id;
  std::uint64_t seed = 0;
};

/// Coefficients of (I-L)^{-d}: psi_0 = 1, psi_j = psi_{j-1} (j-1+d)/j.
MacoeffTable frac_ma_coeffs(double d, long m);

/// Composite causal filter B(L) A^{-1}(L) (I-L)^{-d} to order m.
MacoeffTable farima_ma_coeffs(const FarimaSpec& spec, long m);

/// Theoretical autocovariance. FARIMA(0,d,0) uses the closed form
///   sigma(0) = var Gamma(1-2d)/Gamma(1-d)^2,
///   sigma(h+1)/sigma(h) = (h+d)/(h+1-d);
/// the general case convolves the truncated MA coefficients (truncation
/// error bounded by the table's tail_bound).
CovSeq farima_autocov(const FarimaSpec& spec, long maxlag, long m = 5000);

/// Autocovariance of a generalized fractional model by singularity-splitting
/// quadrature of its spectral density.
CovSeq gegenbauer_autocov(const GegenbauerSpec& spec, long maxlag,
                          const quad::Config& cfg = {});

/// Moving-average trajectory X_t = sum_j psi_j eps_{t-j}, eps iid
/// N(0, noise_var). Streaming, O(m) memory, deterministic given the seed.
Trajectory gen_trajectory_ma(const MacoeffTable& coeffs, long n,
                             std::uint64_t seed);

/// Exact Gaussian draw with the given Toeplitz covariance (n <= 4096).
Trajectory gen_trajectory_exact(const CovSeq& cov, long n, std::uint64_t seed);

/// Cholesky factor of a Toeplitz covariance, reusable across draws (this is
/// what repeated-replication harnesses should hold on to; the factorization
/// dominates a single draw's cost).
class ExactGaussianSampler {
 public:
  /// Factorizes the n x n Toeplitz matrix (n <= 4096); throws
  /// std::domain_error when it is not positive semidefinite after the
  /// 1e-10 diagonal jitter.
  ExactGaussianSampler(const CovSeq& cov, long n);
  ~ExactGaussianSampler();
  ExactGaussianSampler(ExactGaussianSampler&&) noexcept;
  ExactGaussianSampler& operator=(ExactGaussianSampler&&) noexcept;

  long size() const;
  std::string model() const;
  std::vector<double> draw(std::uint64_t seed) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Values of the MA trajectory at the given strictly increasing indices;
/// bit-identical to gen_trajectory_ma restricted to those indices.
std::vector<double> gen_at_indices(const MacoeffTable& coeffs,
                                   const std::vector<std::int64_t>& indices,
                                   std::uint64_t seed);

}  // namespace lmsamp::procgen
