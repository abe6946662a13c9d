#pragma once

#include <functional>
#include <span>
#include <vector>

namespace lmsamp::quad {

struct Config {
  double abs_tol = 1e-8;
  int max_depth = 50;
  /// Lower bound on the initial subdivision; raise for oscillatory
  /// integrands (about one piece per period).
  int min_pieces = 1;
};

struct Result {
  double value = 0.0;
  double err_est = 0.0;
  long n_evals = 0;
};

using Fn = std::function<double(double)>;

/// Adaptive Simpson on [a, b] targeting absolute tolerance tol.
Result integrate(const Fn& f, double a, double b, const Config& cfg);

/// One panel of a composite rule. exp_left / exp_right are power-law
/// exponents e of an integrable singularity f ~ |x - endpoint|^{-e}
/// (0 <= e < 1) at the corresponding endpoint; 0 means regular. A panel may
/// be singular at one endpoint only.
struct Panel {
  double a = 0.0;
  double b = 0.0;
  double exp_left = 0.0;
  double exp_right = 0.0;
};

/// Integrates f over the given panels; endpoint singularities are removed by
/// the substitution x = a + t^{1/(1-e)} before adaptive refinement.
Result integrate_panels(const Fn& f, std::span<const Panel> panels,
                        const Config& cfg);

/// Builds panels covering [lo, hi] split at interior singular frequencies
/// (freq, exponent) and at extra regular breakpoints. Singularities at lo/hi
/// are honored as one-sided.
std::vector<Panel> make_panels(double lo, double hi,
                               std::span<const std::pair<double, double>> sing,
                               std::span<const double> breaks);

}  // namespace lmsamp::quad
