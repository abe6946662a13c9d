#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "lmsamp/common.hpp"

namespace lmsamp::samplaw {

enum class LawKind { Dirac, ParetoTail, Table };

/// Distribution of the i.i.d. integer sampling intervals (support {1,2,...}).
///
/// Variants:
///   Dirac(k)        deterministic sampling every k steps
///   ParetoTail(g)   P(T=j) = j^{1-g} - (j+1)^{1-g}, g > 1
///   Table(p)        explicit pmf on 1..J
class SamplingLaw {
 public:
  static SamplingLaw dirac(std::int64_t k);
  static SamplingLaw pareto(double gamma);
  static SamplingLaw table(std::vector<double> pmf);

  /// Parses "dirac:k", "pareto:g" or "table:p1,p2,...".
  static SamplingLaw parse(std::string_view text);

  LawKind kind() const { return kind_; }
  bool is_dirac() const { return kind_ == LawKind::Dirac; }
  std::int64_t dirac_k() const { return k_; }
  double pareto_gamma() const { return gamma_; }
  const std::vector<double>& table_pmf() const { return pmf_; }
  const std::vector<double>& table_cdf() const { return cdf_; }

  std::string to_string() const;

 private:
  SamplingLaw() = default;
  LawKind kind_ = LawKind::Dirac;
  std::int64_t k_ = 1;
  double gamma_ = 0.0;
  std::vector<double> pmf_;
  std::vector<double> cdf_;
};

/// P(T_1 = j); j < 1 is a domain error.
double pmf(const SamplingLaw& law, std::int64_t j);

/// P(T_1 >= x) for x >= 1. Exact (telescoping) for ParetoTail.
double tail(const SamplingLaw& law, std::int64_t x);

/// One draw from the law (always >= 1).
std::int64_t draw(const SamplingLaw& law, std::mt19937_64& rng);

/// E(T_1); +infinity for ParetoTail with gamma <= 2.
double mean(const SamplingLaw& law);

/// sup { c : E(T_1^c) < infinity } = gamma - 1 for ParetoTail; nullopt for
/// laws with all moments finite (Dirac, Table).
std::optional<double> tail_index(const SamplingLaw& law);

/// Truncated pmf of T_h = sum of h intervals. probs[i] = P(T_h = min_support+i)
/// exactly (up to FFT roundoff); tail_mass = 1 - sum(probs) is the mass beyond
/// the stored support.
struct PmfTable {
  std::int64_t min_support = 0;
  std::vector<double> probs;
  double tail_mass = 0.0;

  double at(std::int64_t j) const {
    std::int64_t i = j - min_support;
    return (i >= 0 && i < static_cast<std::int64_t>(probs.size()))
               ? probs[static_cast<std::size_t>(i)]
               : 0.0;
  }
  std::int64_t max_support() const {
    return min_support + static_cast<std::int64_t>(probs.size()) - 1;
  }
};

/// h-fold convolution power S^{*h} truncated so that tail_mass <= cutoff_mass.
/// Throws resource_error if the required support exceeds the memory budget.
PmfTable convolve_power(const SamplingLaw& law, std::int64_t h,
                        double cutoff_mass);

/// Like convolve_power but truncated at a caller-fixed support bound instead
/// of a mass target (the caller controls the tail * envelope product).
PmfTable convolve_power_capped(const SamplingLaw& law, std::int64_t h,
                               std::int64_t max_support);

/// Characteristic function value S^(lambda) = E e^{i lambda T_1} together
/// with its modulus/argument decomposition rho e^{i tau}.
struct CharFnValue {
  std::complex<double> value;
  double rho = 0.0;
  double tau = 0.0;
  double trunc_error = 0.0;
};

/// Repeated evaluation of the characteristic function of one law.
/// For ParetoTail the series is summed through the polylogarithm identity
///   S^(lambda) = 1 + (1 - e^{-i lambda}) Li_{gamma-1}(e^{i lambda}),
/// with Li evaluated by its Hurwitz expansion on |lambda| < 2 pi; near
/// integer gamma-1 a direct sum with an integration-by-parts tail is used.
class CharFnEvaluator {
 public:
  explicit CharFnEvaluator(const SamplingLaw& law, double tol = 1e-12);
  CharFnValue operator()(double lambda) const;

 private:
  SamplingLaw law_;
  double tol_;
  double s_ = 0.0;  // gamma - 1
  bool use_polylog_ = false;
  std::vector<double> zeta_;  // zeta(s - k)
  std::complex<double> polylog(double lambda) const;
  std::complex<double> direct(double lambda, double* trunc) const;
};

/// One-shot characteristic function (lambda in [-pi, pi]).
CharFnValue char_fn(const SamplingLaw& law, double lambda, double tol = 1e-12);

/// Sampling random walk T_0 = 0 < T_1 < ... < T_n.
struct RandomWalkPath {
  std::vector<std::int64_t> times;
  std::uint64_t seed = 0;
};

RandomWalkPath walk(const SamplingLaw& law, std::int64_t n, std::uint64_t seed);

}  // namespace lmsamp::samplaw
