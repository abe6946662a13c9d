#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lmsamp/common.hpp"
#include "lmsamp/procgen.hpp"
#include "lmsamp/samplaw.hpp"
#include "lmsamp/specmap.hpp"

using namespace lmsamp;
using namespace lmsamp::procgen;

namespace {
constexpr double kPi = std::numbers::pi;

// direct Gamma-ratio evaluation psi_j = Gamma(j+d) / (Gamma(d) Gamma(j+1))
double psi_direct(double d, double j) {
  return std::exp(std::lgamma(j + d) - std::lgamma(d) - std::lgamma(j + 1.0));
}
}  // namespace

TEST_SUITE("procgen") {

TEST_CASE("frac_ma_coeffs: pinned values") {
  auto t0 = frac_ma_coeffs(0.35, 0);
  REQUIRE(t0.coeffs.size() == 1);
  CHECK(t0.coeffs[0] == 1.0);

  auto tz = frac_ma_coeffs(0.0, 5);
  REQUIRE(tz.coeffs.size() == 6);
  CHECK(tz.coeffs[0] == 1.0);
  for (int j = 1; j <= 5; ++j) CHECK(tz.coeffs[j] == 0.0);

  auto t2 = frac_ma_coeffs(0.35, 2);
  CHECK(t2.coeffs[1] == doctest::Approx(0.35).epsilon(1e-15));
  CHECK(t2.coeffs[2] == doctest::Approx(0.23625).epsilon(1e-15));
  CHECK_THROWS_AS(frac_ma_coeffs(0.5, 3), std::domain_error);
  CHECK_THROWS_AS(frac_ma_coeffs(-0.1, 3), std::domain_error);
}

TEST_CASE("frac_ma_coeffs: recursion equals log-Gamma evaluation") {
  for (double d : {0.1, 0.25, 0.35, 0.49}) {
    auto t = frac_ma_coeffs(d, 100000);
    for (long j : {1L, 10L, 100L, 1000L, 10000L, 100000L}) {
      double direct = psi_direct(d, static_cast<double>(j));
      CHECK(t.coeffs[static_cast<std::size_t>(j)] ==
            doctest::Approx(direct).epsilon(1e-12));
    }
    // positive and decreasing for d > 0
    for (long j = 2; j <= 100; ++j) {
      CHECK(t.coeffs[static_cast<std::size_t>(j)] > 0.0);
      CHECK(t.coeffs[static_cast<std::size_t>(j)] <=
            t.coeffs[static_cast<std::size_t>(j - 1)]);
    }
  }
}

TEST_CASE("farima_ma_coeffs: ARMA composition") {
  FarimaSpec plain = FarimaSpec::fractional(0.2);
  auto a = farima_ma_coeffs(plain, 3);
  auto b = frac_ma_coeffs(0.2, 3);
  for (std::size_t j = 0; j < a.coeffs.size(); ++j)
    CHECK(a.coeffs[j] == doctest::Approx(b.coeffs[j]).epsilon(1e-15));

  FarimaSpec ar1;
  ar1.ar = {-0.5};
  auto h = farima_ma_coeffs(ar1, 2);
  CHECK(h.coeffs[0] == doctest::Approx(1.0));
  CHECK(h.coeffs[1] == doctest::Approx(0.5));
  CHECK(h.coeffs[2] == doctest::Approx(0.25));

  FarimaSpec ma1;
  ma1.ma = {0.3};
  auto g = farima_ma_coeffs(ma1, 2);
  CHECK(g.coeffs[0] == doctest::Approx(1.0));
  CHECK(g.coeffs[1] == doctest::Approx(0.3));
  CHECK(g.coeffs[2] == doctest::Approx(0.0));

  FarimaSpec unstable;
  unstable.ar = {-1.01};
  CHECK_THROWS_AS(farima_ma_coeffs(unstable, 2), std::domain_error);
}

TEST_CASE("farima_autocov: white noise and closed-form ratios") {
  auto white = farima_autocov(FarimaSpec::fractional(0.0), 3);
  CHECK(white.values[0] == 1.0);
  CHECK(white.values[1] == 0.0);
  CHECK(white.values[3] == 0.0);

  auto cov = farima_autocov(FarimaSpec::fractional(0.35), 50);
  CHECK(cov.values[1] / cov.values[0] ==
        doctest::Approx(0.35 / 0.65).epsilon(1e-13));
  // exact ratio identity sigma(h+1)/sigma(h) = (h+d)/(h+1-d)
  for (long h = 0; h < 50; ++h) {
    double want = (static_cast<double>(h) + 0.35) /
                  (static_cast<double>(h) + 0.65);
    CHECK(cov.values[static_cast<std::size_t>(h + 1)] /
              cov.values[static_cast<std::size_t>(h)] ==
          doctest::Approx(want).epsilon(1e-13));
  }
}

TEST_CASE("farima_autocov: brute-force psi convolution cross-check") {
  // the truncated convolution undershoots by at most the table's tail bound
  // (psi is decreasing, so sum_{j>m} psi_j psi_{j+h} <= sum_{j>m} psi_j^2)
  const double d = 0.35;
  auto psi = frac_ma_coeffs(d, 1'000'000);
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t j = 0; j + 1 < psi.coeffs.size(); ++j) {
    s0 += psi.coeffs[j] * psi.coeffs[j];
    s1 += psi.coeffs[j] * psi.coeffs[j + 1];
  }
  auto cov = farima_autocov(FarimaSpec::fractional(d), 1);
  CHECK(cov.values[0] >= s0);
  CHECK(cov.values[0] - s0 <= psi.tail_bound * 1.01);
  CHECK(cov.values[1] >= s1);
  CHECK(cov.values[1] - s1 <= psi.tail_bound * 1.01);
}

TEST_CASE("farima_autocov: general ARMA case against AR(1) closed form") {
  FarimaSpec ar1;
  ar1.ar = {-0.5};
  ar1.noise_var = 2.0;
  auto cov = farima_autocov(ar1, 10, 4000);
  for (long h = 0; h <= 10; ++h) {
    double want = 2.0 * std::pow(0.5, static_cast<double>(h)) / (1.0 - 0.25);
    CHECK(cov.values[static_cast<std::size_t>(h)] ==
          doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("farima_autocov: log-log slope equals 2d-1 within 0.01") {
  for (double d : {0.1, 0.35}) {
    auto cov = farima_autocov(FarimaSpec::fractional(d), 1000);
    std::vector<double> lx, ly;
    for (long h = 100; h <= 1000; ++h) {
      lx.push_back(std::log(static_cast<double>(h)));
      ly.push_back(std::log(cov.values[static_cast<std::size_t>(h)]));
    }
    LineFit f = fit_line(lx, ly);
    CHECK(std::abs(f.slope - (2.0 * d - 1.0)) < 0.01);
  }
}

TEST_CASE("gegenbauer_autocov: white, seasonal damping, FARIMA match") {
  GegenbauerSpec white;  // no components, no ARMA: f = 1/(2 pi)
  auto cw = gegenbauer_autocov(white, 3);
  CHECK(cw.values[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(cw.values[1]) < 1e-8);
  CHECK(std::abs(cw.values[3]) < 1e-8);

  GegenbauerSpec seas;
  seas.components = {{2.0 * kPi / 3.0, 0.3}};
  long maxlag = 120;
  auto cs = gegenbauer_autocov(seas, maxlag);
  for (long h = 1; h <= maxlag; ++h)
    CHECK(std::abs(cs.values[static_cast<std::size_t>(h)]) <=
          cs.values[0] + 1e-9);
  // damped oscillation at the seasonal frequency: sign follows cos(2pi h/3)
  double scaled_max = 0.0, scaled_min = 1e300;
  for (long h = 9; h <= 120; ++h) {
    double scaled = cs.values[static_cast<std::size_t>(h)] *
                    std::pow(static_cast<double>(h), 0.4);
    if (h % 3 == 0) {
      CHECK(cs.values[static_cast<std::size_t>(h)] > 0.0);
      scaled_max = std::max(scaled_max, scaled);
      scaled_min = std::min(scaled_min, scaled);
    } else {
      CHECK(cs.values[static_cast<std::size_t>(h)] < 0.0);
    }
  }
  CHECK(scaled_max < 3.0 * scaled_min);  // h^{1-2d} sigma(h) stays bounded

  GegenbauerSpec asfarima;
  asfarima.components = {{0.0, 0.2}};
  auto cg = gegenbauer_autocov(asfarima, 20);
  auto cf = farima_autocov(FarimaSpec::fractional(0.2), 20);
  for (long h = 0; h <= 20; ++h)
    CHECK(cg.values[static_cast<std::size_t>(h)] ==
          doctest::Approx(cf.values[static_cast<std::size_t>(h)])
              .epsilon(1e-6));
}

TEST_CASE("gen_trajectory_ma: identity filter returns the raw draws") {
  auto coeffs = frac_ma_coeffs(0.0, 0);
  auto tr = gen_trajectory_ma(coeffs, 4, 99);
  std::mt19937_64 rng(derive_seed(99, 0, kTagNoise));
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int i = 0; i < 4; ++i)
    CHECK(tr.values[static_cast<std::size_t>(i)] == 1.0 * nd(rng));
}

TEST_CASE("gen_trajectory_ma: determinism") {
  auto coeffs = frac_ma_coeffs(0.35, 200);
  auto a = gen_trajectory_ma(coeffs, 500, 7);
  auto b = gen_trajectory_ma(coeffs, 500, 7);
  CHECK(a.values == b.values);
  auto c = gen_trajectory_ma(coeffs, 500, 8);
  CHECK(a.values != c.values);
}

TEST_CASE("gen_trajectory_ma: sample variance near sigma(0)") {
  const double d = 0.35;
  auto coeffs = frac_ma_coeffs(d, 5000);
  auto tr = gen_trajectory_ma(coeffs, 1'000'000, 20240917);
  double mean = pairwise_sum(tr.values) / 1e6;
  std::vector<double> sq(tr.values.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    double v = tr.values[i] - mean;
    sq[i] = v * v;
  }
  double var = pairwise_sum(sq) / 1e6;
  double sigma0 = farima_autocov(FarimaSpec::fractional(d), 0).values[0];
  // long-memory inflated Monte Carlo error: ~3 se at n = 1e6 (pilot)
  CHECK(var == doctest::Approx(sigma0).epsilon(0.08));
}

TEST_CASE("gen_at_indices: bit-identical restriction of the dense path") {
  auto coeffs = frac_ma_coeffs(0.3, 120);
  const long n = 10000;
  auto dense = gen_trajectory_ma(coeffs, n, 1234);

  std::vector<std::int64_t> all(n);
  for (long i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  auto full = gen_at_indices(coeffs, all, 1234);
  CHECK(full == dense.values);

  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 8; ++rep) {
    std::vector<std::int64_t> idx;
    std::int64_t t = static_cast<std::int64_t>(rng() % 5);
    while (t < n) {
      idx.push_back(t);
      t += 1 + static_cast<std::int64_t>(rng() % 37);
    }
    auto sparse = gen_at_indices(coeffs, idx, 1234);
    REQUIRE(sparse.size() == idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
      CHECK(sparse[i] ==
            dense.values[static_cast<std::size_t>(idx[i])]);  // bitwise
  }
  CHECK_THROWS_AS(gen_at_indices(coeffs, {3, 3}, 1), std::domain_error);
  CHECK_THROWS_AS(gen_at_indices(coeffs, {-1, 2}, 1), std::domain_error);
}

TEST_CASE("gen_at_indices: composes with a heavy-tailed walk") {
  auto coeffs = frac_ma_coeffs(0.35, 500);
  auto path = samplaw::walk(samplaw::SamplingLaw::pareto(2.8), 100, 3);
  auto y = gen_at_indices(coeffs, path.times, 3);
  REQUIRE(y.size() == 101);
  for (double v : y) CHECK(std::isfinite(v));
}

TEST_CASE("gen_trajectory_exact: independent pair, matching lag-1, non-PSD") {
  CovSeq eye;
  eye.values = {1.0, 0.0};
  eye.model = "white";
  const int reps = 100000;
  double s00 = 0, s11 = 0, s01 = 0;
  for (int i = 0; i < reps; ++i) {
    auto tr = gen_trajectory_exact(eye, 2, derive_seed(77, i, 9));
    s00 += tr.values[0] * tr.values[0];
    s11 += tr.values[1] * tr.values[1];
    s01 += tr.values[0] * tr.values[1];
  }
  CHECK(s00 / reps == doctest::Approx(1.0).epsilon(0.02));
  CHECK(s11 / reps == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(s01 / reps) < 0.015);  // > 3 / sqrt(reps)

  const double d = 0.35;
  auto cov = farima_autocov(FarimaSpec::fractional(d), 64);
  const int reps2 = 10000;
  const long n = 64;
  std::vector<double> lag1(reps2);
  for (int i = 0; i < reps2; ++i) {
    auto tr = gen_trajectory_exact(cov, n, derive_seed(78, i, 9));
    double s = 0.0;
    for (long t = 0; t + 1 < n; ++t)
      s += tr.values[static_cast<std::size_t>(t)] *
           tr.values[static_cast<std::size_t>(t + 1)];
    lag1[static_cast<std::size_t>(i)] = s / static_cast<double>(n - 1);
  }
  MeanSd ms = mean_sd(lag1);
  double se = ms.sd / std::sqrt(static_cast<double>(reps2));
  CHECK(std::abs(ms.mean - cov.values[1]) <= 3.0 * se);

  CovSeq bad;
  bad.values = {1.0, 2.0};
  CHECK_THROWS_AS(gen_trajectory_exact(bad, 2, 1), std::domain_error);
  CHECK_THROWS_AS(gen_trajectory_exact(eye, 5000, 1), std::domain_error);
}

TEST_CASE("model validation") {
  FarimaSpec bad_var;
  bad_var.noise_var = 0.0;
  CHECK_THROWS_AS(bad_var.validate(), std::domain_error);

  GegenbauerSpec dup;
  dup.components = {{1.0, 0.2}, {1.0, 0.3}};
  CHECK_THROWS_AS(dup.validate(), std::domain_error);
  GegenbauerSpec oob;
  oob.components = {{1.0, 0.6}};
  CHECK_THROWS_AS(oob.validate(), std::domain_error);
  GegenbauerSpec with_d;
  with_d.components = {{1.0, 0.2}};
  with_d.arma = FarimaSpec::fractional(0.1);
  CHECK_THROWS_AS(with_d.validate(), std::domain_error);
}

}  // TEST_SUITE
