#include "lmsamp/specmap.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "lmsamp/common.hpp"

namespace lmsamp::specmap {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kMergeTol = 1e-9;

std::complex<double> poly_at(const std::vector<double>& coeffs,
                             std::complex<double> z) {
  // 1 + c_1 z + ... + c_p z^p, evaluated by Horner
  std::complex<double> acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
    acc = (acc + *it) * z;
  return acc + 1.0;
}

double arma_factor(const procgen::FarimaSpec& spec, double lambda) {
  const std::complex<double> z = std::exp(std::complex<double>(0.0, lambda));
  double num = std::norm(poly_at(spec.ma, z));
  double den = std::norm(poly_at(spec.ar, z));
  return spec.noise_var / (2.0 * kPi) * num / den;
}

double check_finite(double v) {
  if (!std::isfinite(v))
    throw std::domain_error("spectral density evaluated at a singular frequency");
  return v;
}

}  // namespace

double farima_sd(const procgen::FarimaSpec& spec, double lambda) {
  double base = arma_factor(spec, lambda);
  if (spec.d != 0.0) {
    double dist = 2.0 * std::abs(std::sin(0.5 * lambda));
    base *= std::pow(dist, -2.0 * spec.d);
  }
  return check_finite(base);
}

double gegenbauer_sd(const procgen::GegenbauerSpec& spec, double lambda) {
  double base = spec.arma ? arma_factor(*spec.arma, lambda) : 1.0 / (2.0 * kPi);
  for (const auto& c : spec.components) {
    // |e^{i lam} - e^{i theta}| = 2 |sin((lam - theta)/2)|
    double d1 = 2.0 * std::abs(std::sin(0.5 * (lambda - c.theta)));
    bool on_axis = c.theta < kMergeTol || c.theta > kPi - kMergeTol;
    if (on_axis) {
      base *= std::pow(d1, -2.0 * c.d);
    } else {
      double d2 = 2.0 * std::abs(std::sin(0.5 * (lambda + c.theta)));
      base *= std::pow(d1 * d2, -2.0 * c.d);
    }
  }
  return check_finite(base);
}

SingularitySet model_singularities(const procgen::FarimaSpec& spec) {
  SingularitySet s;
  if (spec.d > 0.0) s.entries.push_back({0.0, spec.d});
  return s;
}

SingularitySet model_singularities(const procgen::GegenbauerSpec& spec) {
  SingularitySet s;
  for (const auto& c : spec.components) s.entries.push_back({c.theta, c.d});
  std::sort(s.entries.begin(), s.entries.end(),
            [](const Singularity& a, const Singularity& b) {
              return a.freq < b.freq;
            });
  return s;
}

Density make_density(const procgen::FarimaSpec& spec) {
  spec.validate();
  Density d;
  d.f = [spec](double lam) { return farima_sd(spec, lam); };
  d.singularities = model_singularities(spec);
  return d;
}

Density make_density(const procgen::GegenbauerSpec& spec) {
  spec.validate();
  Density d;
  d.f = [spec](double lam) { return gegenbauer_sd(spec, lam); };
  d.singularities = model_singularities(spec);
  return d;
}

double alias_sd(const std::function<double(double)>& f, long k,
                double lambda) {
  if (k < 1) throw std::domain_error("decimation factor must be >= 1");
  if (lambda >= kPi && lambda <= kPi + 1e-9) lambda = -kPi;  // periodic wrap
  if (lambda < -kPi - 1e-9 || lambda >= kPi)
    throw std::domain_error("alias_sd argument must lie in [-pi, pi)");
  lambda = std::max(lambda, -kPi);
  const double kd = static_cast<double>(k);
  double sum = 0.0;
  if (k % 2 == 1) {
    long ell = (k - 1) / 2;
    for (long j = -ell; j <= ell; ++j)
      sum += f((lambda - 2.0 * kPi * static_cast<double>(j)) / kd);
  } else {
    long ell = k / 2;
    for (long j = -ell + 1; j <= ell - 1; ++j)
      sum += f((lambda - 2.0 * kPi * static_cast<double>(j)) / kd);
    double sgn = (lambda >= 0.0) ? 1.0 : -1.0;  // right-limit at 0
    sum += f((lambda - 2.0 * kPi * static_cast<double>(ell) * sgn) / kd);
  }
  return check_finite(sum / kd);
}

SingularitySet fold_singularities(const SingularitySet& sings, long k) {
  if (k < 1) throw std::domain_error("decimation factor must be >= 1");
  SingularitySet out;
  for (const auto& e : sings.entries) {
    double img = static_cast<double>(k) * e.freq;
    img = std::remainder(img, 2.0 * kPi);  // to (-pi, pi]
    img = std::abs(img);                   // fold to [0, pi]
    bool merged = false;
    for (auto& o : out.entries) {
      if (std::abs(o.freq - img) < kMergeTol) {
        o.exponent = std::max(o.exponent, e.exponent);
        merged = true;
        break;
      }
    }
    if (!merged) out.entries.push_back({img, e.exponent});
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const Singularity& a, const Singularity& b) {
              return a.freq < b.freq;
            });
  return out;
}

double local_exponent(const std::function<double(double)>& f, double lambda0,
                      const std::vector<double>& offsets) {
  if (offsets.size() < 2)
    throw std::domain_error("local_exponent needs at least two offsets");
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    if (!(offsets[i] > 0.0) || offsets[i] < 1e-6)
      throw std::domain_error("offsets must be positive and >= 1e-6");
    if (i > 0 && offsets[i] >= offsets[i - 1])
      throw std::domain_error("offsets must be decreasing");
  }
  std::vector<double> lx, ly;
  for (double delta : offsets) {
    double v = f(lambda0 + delta);
    if (!std::isfinite(v) || v <= 0.0)
      throw std::domain_error("density not finite/positive at probe point");
    lx.push_back(std::log(delta));
    ly.push_back(std::log(v));
  }
  LineFit fit = fit_line(lx, ly);
  return -fit.slope / 2.0;
}

double poisson_kernel(double s, double t) {
  if (!(s >= 0.0 && s < 1.0))
    throw std::domain_error("Poisson kernel requires 0 <= s < 1");
  // 1 - 2 s cos t + s^2 = (1-s)^2 + 4 s sin^2(t/2), cancellation-free near
  // the peak (1 - cos t underflows long before sin(t/2) does)
  double sh = std::sin(0.5 * t);
  double den = (1.0 - s) * (1.0 - s) + 4.0 * s * sh * sh;
  return (1.0 - s * s) / (2.0 * kPi * den);
}

namespace {

// wraps x to (-pi, pi]
double wrap_angle(double x) {
  double w = std::remainder(x, 2.0 * kPi);
  return w;
}

// locates solutions of tau(lambda) = target on (0, pi) by scanning a mixed
// linear/log grid and bisecting sign changes of the wrapped difference
std::vector<double> arg_preimages(const samplaw::CharFnEvaluator& cf,
                                  double target) {
  std::vector<double> grid;
  grid.reserve(1100);
  for (int i = 1; i <= 160; ++i)
    grid.push_back(kPi * std::pow(10.0, -8.0 + 6.0 * i / 160.0) / 100.0);
  for (int i = 1; i < 900; ++i)
    grid.push_back(kPi * static_cast<double>(i) / 900.0);
  std::sort(grid.begin(), grid.end());
  auto diff = [&](double lam) { return wrap_angle(cf(lam).tau - target); };
  std::vector<double> roots;
  double prev = diff(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    double cur = diff(grid[i]);
    // skip brackets produced by the +-pi branch jump of wrap_angle
    if (prev == 0.0) roots.push_back(grid[i - 1]);
    if (prev * cur < 0.0 && std::abs(prev) + std::abs(cur) < kPi) {
      double a = grid[i - 1], b = grid[i], fa = prev;
      for (int it = 0; it < 60; ++it) {
        double m = 0.5 * (a + b);
        double fm = diff(m);
        if (fa * fm <= 0.0)
          b = m;
        else {
          a = m;
          fa = fm;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev = cur;
  }
  return roots;
}

}  // namespace

KernelEval g_r_theta(const Density& fx, const samplaw::SamplingLaw& law,
                     double r, double theta, const quad::Config& cfg) {
  if (law.is_dirac())
    throw std::domain_error("g(r, theta) requires a non-deterministic law");
  if (!(r >= 0.0 && r < 1.0))
    throw std::domain_error("g(r, theta) requires 0 <= r < 1");
  if (!(theta > -kPi && theta < kPi))
    throw std::domain_error("theta must lie in (-pi, pi)");

  samplaw::CharFnEvaluator cf(law);
  auto integrand = [&](double lam) {
    auto v = cf(lam);
    double s = r * v.rho;
    return fx.f(lam) * (1.0 / kPi + poisson_kernel(s, v.tau - theta) +
                        poisson_kernel(s, v.tau + theta));
  };

  // refine around the kernel peaks: preimages of +-theta under tau
  std::vector<double> breaks;
  for (double target : {theta, -theta}) {
    for (double root : arg_preimages(cf, target)) {
      double width = std::max(1.0 - r * cf(root).rho, 1e-10);
      breaks.push_back(root);
      for (double w = width; w < kPi; w *= 4.0) {
        if (root - w > 0.0) breaks.push_back(root - w);
        if (root + w < kPi) breaks.push_back(root + w);
      }
    }
    if (theta == 0.0) break;
  }
  std::vector<std::pair<double, double>> sp;
  for (const auto& e : fx.singularities.entries)
    sp.push_back({e.freq, 2.0 * e.exponent});

  auto panels = quad::make_panels(0.0, kPi, sp, breaks);
  quad::Result res = quad::integrate_panels(integrand, panels, cfg);

  KernelEval out;
  out.r = r;
  out.theta = theta;
  out.value = 0.5 * res.value;  // (1/4) * 2 (evenness of f and the kernel sum)
  out.quad_error = 0.5 * res.err_est;
  out.n_evals = res.n_evals;
  if (out.quad_error > 100.0 * cfg.abs_tol)
    throw numeric_error("g(r, theta): quadrature failed to converge");
  return out;
}

std::vector<double> default_r_seq(int j_lo, int j_hi) {
  std::vector<double> r;
  for (int j = j_lo; j <= j_hi; ++j)
    r.push_back(1.0 - std::pow(2.0, -static_cast<double>(j)));
  return r;
}

SampledSdValue sampled_sd_limit(const Density& fx,
                                const samplaw::SamplingLaw& law, double theta,
                                const std::vector<double>& r_seq,
                                const quad::Config& cfg) {
  if (!(theta > 0.0 && theta < kPi))
    throw std::domain_error("sampled spectrum frequency must lie in (0, pi)");
  if (r_seq.size() < 4)
    throw std::domain_error("need at least four radii to extrapolate");
  for (std::size_t i = 1; i < r_seq.size(); ++i)
    if (!(r_seq[i] > r_seq[i - 1]) || !(r_seq[i] < 1.0))
      throw std::domain_error("radii must increase toward 1");

  SampledSdValue out;
  out.g_values.reserve(r_seq.size());
  for (double r : r_seq)
    out.g_values.push_back(g_r_theta(fx, law, r, theta, cfg).value);

  const std::size_t n = out.g_values.size();
  double scale = std::abs(out.g_values.back()) + 1e-300;
  std::vector<double> diffs(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    diffs[i] = out.g_values[i] - out.g_values[i + 1];
  out.last_diff = std::abs(diffs.back());

  double g_limit;
  double conv_floor = std::max(10.0 * cfg.abs_tol, 1e-12 * scale);
  if (out.last_diff < conv_floor &&
      std::abs(diffs[diffs.size() - 2]) < conv_floor) {
    // already converged (e.g. white noise: g is constant in r)
    g_limit = out.g_values.back();
  } else {
    // diagnostics: the tail of the difference sequence must decrease (small
    // slack; early differences may still accelerate toward the peak regime)
    for (std::size_t i = n - 3; i + 2 < n; ++i) {
      if (std::abs(diffs[i + 1]) >= 1.05 * std::abs(diffs[i]) &&
          std::abs(diffs[i + 1]) > conv_floor)
        throw numeric_error(
            "sampled_sd_limit: successive differences are not decreasing");
    }
    // fit value ~ a + b (1-r)^c on the last three points:
    //   d_k := u_k - u_{k+1} = b (x_k^c - x_{k+1}^c),  x = 1 - r,
    // so a = u_last - d_last / (q - 1) with q = (x_{last-1}/x_last)^c.
    double xa = 1.0 - r_seq[n - 3], xb = 1.0 - r_seq[n - 2],
           xc = 1.0 - r_seq[n - 1];
    double da = diffs[n - 3], db = diffs[n - 2];
    double c = std::log(std::abs(da / db)) / std::log(xa / xb);
    if (!(c > 0.05) || !std::isfinite(c))
      throw numeric_error("sampled_sd_limit: no decaying power fit");
    double q = std::pow(xb / xc, c);
    g_limit = out.g_values.back() - db / (q - 1.0);
  }

  // The kernel average g carries the one-sided covariance series: its limit
  // is (f_Y(theta) + sigma_X(0)/(2 pi)) / 2, since the cos(k theta)
  // coefficients of g come out as sigma_Y(k)/(2 pi) instead of twice that.
  // Undo this to return the spectral density itself.
  std::vector<std::pair<double, double>> sp;
  for (const auto& e : fx.singularities.entries)
    sp.push_back({e.freq, 2.0 * e.exponent});
  auto panels = quad::make_panels(0.0, kPi, sp, {});
  quad::Config mass_cfg = cfg;
  mass_cfg.abs_tol = std::min(cfg.abs_tol, 1e-9);
  double sigma0 = 2.0 * quad::integrate_panels(fx.f, panels, mass_cfg).value;
  out.value = 2.0 * g_limit - sigma0 / (2.0 * kPi);
  return out;
}

namespace {
// 16-point Gauss-Legendre rule on [-1, 1]
constexpr double kGlX[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};
constexpr double kGlW[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};
}  // namespace

SampledSdTab sampled_sd_tabulate(const Density& fx,
                                 const samplaw::SamplingLaw& law,
                                 const std::vector<double>& r_seq,
                                 const quad::Config& cfg, int grade_levels,
                                 unsigned threads) {
  SampledSdTab tab;
  // dyadic panels accumulating toward 0
  std::vector<double> edges;
  edges.push_back(kPi);
  double e = kPi;
  for (int i = 0; i < grade_levels; ++i) {
    e *= 0.5;
    edges.push_back(e);
  }
  tab.head_cut = edges.back();
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    double hi = edges[p], lo = edges[p + 1];
    double mid = 0.5 * (hi + lo), half = 0.5 * (hi - lo);
    for (int i = 7; i >= 0; --i) {
      tab.nodes.push_back(mid - half * kGlX[i]);
      tab.weights.push_back(half * kGlW[i]);
    }
    for (int i = 0; i < 8; ++i) {
      tab.nodes.push_back(mid + half * kGlX[i]);
      tab.weights.push_back(half * kGlW[i]);
    }
  }
  // nodes ascend panel-by-panel from pi downward; sort ascending
  std::vector<std::size_t> order(tab.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return tab.nodes[a] < tab.nodes[b];
  });
  std::vector<double> nodes(order.size()), weights(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    nodes[i] = tab.nodes[order[i]];
    weights[i] = tab.weights[order[i]];
  }
  tab.nodes = std::move(nodes);
  tab.weights = std::move(weights);

  tab.values.assign(tab.nodes.size(), 0.0);
  parallel_for(tab.nodes.size(), threads, [&](std::size_t i) {
    tab.values[i] =
        sampled_sd_limit(fx, law, tab.nodes[i], r_seq, cfg).value;
  });

  // local power model on (0, head_cut): least-squares log-log fit over the
  // nodes of the lowest panels
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < tab.nodes.size(); ++i) {
    if (tab.nodes[i] >= 8.0 * tab.head_cut) break;
    if (tab.values[i] > 0.0) {
      lx.push_back(std::log(tab.nodes[i]));
      ly.push_back(std::log(tab.values[i]));
    }
  }
  if (lx.size() >= 4) {
    LineFit fit = fit_line(lx, ly);
    double expo = -fit.slope;
    if (expo > 0.0 && expo < 1.0) {
      tab.head_exponent = expo;
      tab.head_coeff = std::exp(fit.intercept);
    } else {
      tab.head_exponent = 0.0;
      tab.head_coeff = std::max(tab.values[0], 0.0);
    }
  } else {
    tab.head_exponent = 0.0;
    tab.head_coeff = tab.values.empty() ? 0.0 : std::max(tab.values[0], 0.0);
  }
  return tab;
}

std::vector<double> fourier_from_tab(const SampledSdTab& tab, long H) {
  std::vector<double> out(static_cast<std::size_t>(H) + 1, 0.0);
  for (long h = 0; h <= H; ++h) {
    std::vector<double> terms(tab.nodes.size());
    for (std::size_t i = 0; i < tab.nodes.size(); ++i)
      terms[i] = tab.weights[i] * tab.values[i] *
                 std::cos(static_cast<double>(h) * tab.nodes[i]);
    double v = pairwise_sum(terms);
    // analytic head: int_0^cut c x^{-e} cos(hx) dx ~ c cut^{1-e}/(1-e)
    double head = tab.head_coeff *
                  std::pow(tab.head_cut, 1.0 - tab.head_exponent) /
                  (1.0 - tab.head_exponent);
    out[static_cast<std::size_t>(h)] = 2.0 * (v + head);
  }
  return out;
}

SpectralGrid tabulate(const std::function<double(double)>& f, std::size_t n,
                      const std::string& meta) {
  SpectralGrid g;
  g.meta = meta;
  g.freqs.reserve(n);
  g.values.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    double lam = kPi * static_cast<double>(i) / static_cast<double>(n);
    g.freqs.push_back(lam);
    g.values.push_back(f(lam));
  }
  return g;
}

}  // namespace lmsamp::specmap
