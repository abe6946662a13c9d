#include "lmsamp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lmsamp/common.hpp"

namespace lmsamp::quad {

namespace {

struct Worker {
  const Fn* f = nullptr;
  long n_evals = 0;
  double err_acc = 0.0;
  int max_depth = 50;

  double eval(double x) {
    ++n_evals;
    return (*f)(x);
  }

  // classic adaptive Simpson with Richardson correction
  double simpson_rec(double a, double b, double fa, double fm, double fb,
                     double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = eval(lm), frm = eval(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    // the halved tolerance must stay above the roundoff of the local sums,
    // otherwise the recursion can never terminate on its own
    double floor_tol = 4e-16 * (std::abs(left) + std::abs(right)) + 1e-300;
    if (depth >= max_depth || std::abs(delta) <= 15.0 * std::max(tol, floor_tol)) {
      err_acc += std::abs(delta) / 15.0;
      return left + right + delta / 15.0;
    }
    return simpson_rec(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           simpson_rec(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }

  double run(double a, double b, double tol, int min_pieces) {
    if (!(b > a)) return 0.0;
    int pieces = std::max(1, min_pieces);
    double total = 0.0;
    double w = (b - a) / pieces;
    double ptol = tol / pieces;
    for (int i = 0; i < pieces; ++i) {
      double x0 = a + i * w, x1 = (i + 1 == pieces) ? b : x0 + w;
      double fa = eval(x0), fb = eval(x1), fm = eval(0.5 * (x0 + x1));
      double whole = (x1 - x0) / 6.0 * (fa + 4.0 * fm + fb);
      total += simpson_rec(x0, x1, fa, fm, fb, whole, ptol, 0);
    }
    return total;
  }
};

}  // namespace

Result integrate(const Fn& f, double a, double b, const Config& cfg) {
  Worker w;
  w.f = &f;
  w.max_depth = cfg.max_depth;
  Result r;
  r.value = w.run(a, b, cfg.abs_tol, cfg.min_pieces);
  r.err_est = w.err_acc;
  r.n_evals = w.n_evals;
  return r;
}

namespace {

// integral over a panel singular at the left endpoint:
// x = a + t^q with q = 1/(1-e) maps the t-integrand to a bounded one.
// The substitution stops at a small offset dx0 (absolute-coordinate rounding
// makes f unevaluable closer in); the remaining sliver is integrated with
// the known local power model, int_0^dx0 c u^{-e} du = f(a+dx0) dx0 / (1-e).
Result integrate_left_singular(const Fn& f, double a, double b, double e,
                               const Config& cfg) {
  const double q = 1.0 / (1.0 - e);
  const double dx0 = std::min(1e-10, 0.25 * (b - a));
  const double t0 = std::pow(dx0, 1.0 / q);
  const double T = std::pow(b - a, 1.0 / q);
  auto g = [&](double t) {
    double dx = std::pow(t, q);
    return f(a + dx) * q * std::pow(t, q - 1.0);
  };
  Config sub = cfg;
  sub.min_pieces = std::max(cfg.min_pieces, 4);
  Result r = integrate(g, t0, T, sub);
  double sliver = f(a + dx0) * dx0 / (1.0 - e);
  r.value += sliver;
  r.err_est += std::abs(sliver) * (1e-5 + dx0);
  r.n_evals += 1;
  return r;
}

}  // namespace

Result integrate_panels(const Fn& f, std::span<const Panel> panels,
                        const Config& cfg) {
  Result total;
  Config per = cfg;
  // per-panel budget: most panels converge far below their share, so a full
  // 1/n split over-refines badly when peak hints create many panels
  if (!panels.empty())
    per.abs_tol =
        cfg.abs_tol / std::min<double>(static_cast<double>(panels.size()), 8.0);
  for (const Panel& p : panels) {
    if (!(p.b > p.a)) continue;
    Result r;
    if (p.exp_left > 0.0 && p.exp_right > 0.0) {
      double m = 0.5 * (p.a + p.b);
      Config half = per;
      half.abs_tol = 0.5 * per.abs_tol;
      Result rl = integrate_left_singular(f, p.a, m, p.exp_left, half);
      auto flipped = [&](double t) { return f(p.a + p.b - t); };
      Result rr =
          integrate_left_singular(flipped, p.a, m, p.exp_right, half);
      r.value = rl.value + rr.value;
      r.err_est = rl.err_est + rr.err_est;
      r.n_evals = rl.n_evals + rr.n_evals;
    } else if (p.exp_left > 0.0) {
      r = integrate_left_singular(f, p.a, p.b, p.exp_left, per);
    } else if (p.exp_right > 0.0) {
      auto flipped = [&](double t) { return f(p.a + p.b - t); };
      r = integrate_left_singular(flipped, p.a, p.b, p.exp_right, per);
    } else {
      r = integrate(f, p.a, p.b, per);
    }
    total.value += r.value;
    total.err_est += r.err_est;
    total.n_evals += r.n_evals;
  }
  return total;
}

std::vector<Panel> make_panels(double lo, double hi,
                               std::span<const std::pair<double, double>> sing,
                               std::span<const double> breaks) {
  struct Point {
    double x;
    double expo;  // 0 for a plain breakpoint
  };
  std::vector<Point> pts;
  pts.push_back({lo, 0.0});
  pts.push_back({hi, 0.0});
  for (const auto& [x, e] : sing)
    if (x >= lo - 1e-12 && x <= hi + 1e-12) pts.push_back({x, e});
  for (double x : breaks)
    if (x > lo && x < hi) pts.push_back({x, 0.0});
  std::sort(pts.begin(), pts.end(),
            [](const Point& a, const Point& b) { return a.x < b.x; });
  // merge near-coincident points, keeping the larger exponent
  std::vector<Point> merged;
  for (const Point& p : pts) {
    if (!merged.empty() && p.x - merged.back().x < 1e-12)
      merged.back().expo = std::max(merged.back().expo, p.expo);
    else
      merged.push_back(p);
  }
  std::vector<Panel> panels;
  for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
    Panel p;
    p.a = merged[i].x;
    p.b = merged[i + 1].x;
    p.exp_left = merged[i].expo;
    p.exp_right = merged[i + 1].expo;
    panels.push_back(p);
  }
  return panels;
}

}  // namespace lmsamp::quad
