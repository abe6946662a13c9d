#include "lmsamp/samplaw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "lmsamp/fft.hpp"

namespace lmsamp::samplaw {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr std::int64_t kSupportBudget = std::int64_t{1} << 25;
constexpr std::int64_t kDrawCap = std::int64_t{1} << 62;

double pareto_tail(double gamma, double x) { return std::pow(x, 1.0 - gamma); }
}  // namespace

SamplingLaw SamplingLaw::dirac(std::int64_t k) {
  if (k < 1) throw std::domain_error("dirac law requires k >= 1");
  SamplingLaw law;
  law.kind_ = LawKind::Dirac;
  law.k_ = k;
  return law;
}

SamplingLaw SamplingLaw::pareto(double gamma) {
  if (!(gamma > 1.0))
    throw std::domain_error("pareto law requires gamma > 1");
  SamplingLaw law;
  law.kind_ = LawKind::ParetoTail;
  law.gamma_ = gamma;
  return law;
}

SamplingLaw SamplingLaw::table(std::vector<double> pmf) {
  if (pmf.empty()) throw std::domain_error("table law requires a nonempty pmf");
  double sum = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0)) throw std::domain_error("table pmf entries must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::domain_error("table pmf must sum to 1 (within 1e-12)");
  SamplingLaw law;
  law.kind_ = LawKind::Table;
  law.pmf_ = std::move(pmf);
  law.cdf_.resize(law.pmf_.size());
  double c = 0.0;
  for (std::size_t i = 0; i < law.pmf_.size(); ++i) {
    c += law.pmf_[i];
    law.cdf_[i] = c;
  }
  law.cdf_.back() = 1.0;
  return law;
}

SamplingLaw SamplingLaw::parse(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw std::domain_error("law spec must look like dirac:k, pareto:g or "
                            "table:p1,p2,...");
  std::string head(text.substr(0, colon));
  std::string rest(text.substr(colon + 1));
  if (head == "dirac") return dirac(std::stoll(rest));
  if (head == "pareto") return pareto(std::stod(rest));
  if (head == "table") {
    std::vector<double> pmf;
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) pmf.push_back(std::stod(item));
    return table(std::move(pmf));
  }
  throw std::domain_error("unknown law kind: " + head);
}

std::string SamplingLaw::to_string() const {
  std::ostringstream os;
  switch (kind_) {
    case LawKind::Dirac:
      os << "dirac:" << k_;
      break;
    case LawKind::ParetoTail:
      os << "pareto:" << gamma_;
      break;
    case LawKind::Table: {
      os << "table:";
      for (std::size_t i = 0; i < pmf_.size(); ++i)
        os << (i ? "," : "") << pmf_[i];
      break;
    }
  }
  return os.str();
}

double pmf(const SamplingLaw& law, std::int64_t j) {
  if (j < 1) throw std::domain_error("pmf argument must be >= 1");
  switch (law.kind()) {
    case LawKind::Dirac:
      return j == law.dirac_k() ? 1.0 : 0.0;
    case LawKind::ParetoTail: {
      double g = law.pareto_gamma();
      return pareto_tail(g, static_cast<double>(j)) -
             pareto_tail(g, static_cast<double>(j + 1));
    }
    case LawKind::Table: {
      auto idx = static_cast<std::size_t>(j - 1);
      return idx < law.table_pmf().size() ? law.table_pmf()[idx] : 0.0;
    }
  }
  return 0.0;
}

double tail(const SamplingLaw& law, std::int64_t x) {
  if (x < 1) throw std::domain_error("tail argument must be >= 1");
  switch (law.kind()) {
    case LawKind::Dirac:
      return x <= law.dirac_k() ? 1.0 : 0.0;
    case LawKind::ParetoTail:
      return pareto_tail(law.pareto_gamma(), static_cast<double>(x));
    case LawKind::Table: {
      if (x == 1) return 1.0;
      auto idx = static_cast<std::size_t>(x - 1);
      if (idx >= law.table_cdf().size()) return 0.0;
      return 1.0 - law.table_cdf()[idx - 1];
    }
  }
  return 0.0;
}

std::int64_t draw(const SamplingLaw& law, std::mt19937_64& rng) {
  switch (law.kind()) {
    case LawKind::Dirac:
      return law.dirac_k();
    case LawKind::ParetoTail: {
      // floor(u^{1/(1-gamma)}) with u uniform on (0, 1]
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      double u = 1.0 - unif(rng);
      double v = std::pow(u, 1.0 / (1.0 - law.pareto_gamma()));
      if (!(v < static_cast<double>(kDrawCap))) return kDrawCap;
      return std::max<std::int64_t>(1, static_cast<std::int64_t>(v));
    }
    case LawKind::Table: {
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      double u = unif(rng);
      const auto& cdf = law.table_cdf();
      auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
      if (it == cdf.end()) --it;
      return static_cast<std::int64_t>(it - cdf.begin()) + 1;
    }
  }
  return 1;
}

double mean(const SamplingLaw& law) {
  switch (law.kind()) {
    case LawKind::Dirac:
      return static_cast<double>(law.dirac_k());
    case LawKind::Table: {
      std::vector<double> terms(law.table_pmf().size());
      for (std::size_t i = 0; i < terms.size(); ++i)
        terms[i] = static_cast<double>(i + 1) * law.table_pmf()[i];
      return pairwise_sum(terms);
    }
    case LawKind::ParetoTail: {
      double g = law.pareto_gamma();
      if (g <= 2.0) return std::numeric_limits<double>::infinity();
      // E(T_1) = sum_{x>=1} P(T_1 >= x) = sum x^{1-g}; direct sum plus
      // Euler-Maclaurin tail.
      const std::int64_t n = 1'000'000;
      std::vector<double> terms(static_cast<std::size_t>(n));
      for (std::int64_t x = 1; x <= n; ++x)
        terms[static_cast<std::size_t>(x - 1)] =
            pareto_tail(g, static_cast<double>(x));
      double head = pairwise_sum(terms);
      double m = static_cast<double>(n + 1);
      double tail_sum = std::pow(m, 2.0 - g) / (g - 2.0) +
                        0.5 * std::pow(m, 1.0 - g) +
                        (g - 1.0) * std::pow(m, -g) / 12.0;
      return head + tail_sum;
    }
  }
  return 0.0;
}

std::optional<double> tail_index(const SamplingLaw& law) {
  if (law.kind() == LawKind::ParetoTail) return law.pareto_gamma() - 1.0;
  return std::nullopt;
}

// --- convolution powers ------------------------------------------------------

namespace {

struct OffsetPmf {
  std::int64_t offset = 0;
  std::vector<double> probs;
};

void clamp_nonneg(std::vector<double>& v) {
  for (double& x : v)
    if (x < 0.0) x = 0.0;
}

// truncates entries with absolute index > max_support
void truncate_abs(OffsetPmf& p, std::int64_t max_support) {
  std::int64_t len = max_support - p.offset + 1;
  if (len < 0) len = 0;
  if (static_cast<std::int64_t>(p.probs.size()) > len)
    p.probs.resize(static_cast<std::size_t>(len));
}

OffsetPmf conv(const OffsetPmf& a, const OffsetPmf& b,
               std::int64_t max_support) {
  OffsetPmf out;
  out.offset = a.offset + b.offset;
  out.probs = fft::convolve(a.probs, b.probs);
  clamp_nonneg(out.probs);
  truncate_abs(out, max_support);
  return out;
}

// single-step pmf truncated at max_support (absolute index)
OffsetPmf base_pmf(const SamplingLaw& law, std::int64_t max_support) {
  OffsetPmf p;
  p.offset = 1;
  std::int64_t len = 0;
  switch (law.kind()) {
    case LawKind::Dirac:
      p.offset = law.dirac_k();
      p.probs = {1.0};
      truncate_abs(p, max_support);
      return p;
    case LawKind::Table:
      len = std::min<std::int64_t>(
          static_cast<std::int64_t>(law.table_pmf().size()), max_support);
      p.probs.assign(law.table_pmf().begin(), law.table_pmf().begin() + len);
      return p;
    case LawKind::ParetoTail: {
      len = max_support;
      p.probs.resize(static_cast<std::size_t>(len));
      double g = law.pareto_gamma();
      double prev = 1.0;
      for (std::int64_t j = 1; j <= len; ++j) {
        double next = pareto_tail(g, static_cast<double>(j + 1));
        p.probs[static_cast<std::size_t>(j - 1)] = prev - next;
        prev = next;
      }
      return p;
    }
  }
  return p;
}

PmfTable finish(OffsetPmf p, std::int64_t h) {
  // S^{*h} has support starting at h; drop leading zeros below that
  PmfTable out;
  out.min_support = p.offset;
  out.probs = std::move(p.probs);
  if (out.min_support < h) {
    std::int64_t shift = h - out.min_support;
    if (shift < static_cast<std::int64_t>(out.probs.size()))
      out.probs.erase(out.probs.begin(), out.probs.begin() + shift);
    else
      out.probs.clear();
    out.min_support = h;
  }
  double total = pairwise_sum(out.probs);
  out.tail_mass = std::max(0.0, 1.0 - total);
  return out;
}

OffsetPmf power(const SamplingLaw& law, std::int64_t h,
                std::int64_t max_support) {
  OffsetPmf base = base_pmf(law, max_support);
  OffsetPmf acc;
  bool have_acc = false;
  std::int64_t e = h;
  OffsetPmf sq = base;
  while (e > 0) {
    if (e & 1) {
      acc = have_acc ? conv(acc, sq, max_support) : sq;
      have_acc = true;
    }
    e >>= 1;
    if (e > 0) sq = conv(sq, sq, max_support);
  }
  return acc;
}

}  // namespace

PmfTable convolve_power_capped(const SamplingLaw& law, std::int64_t h,
                               std::int64_t max_support) {
  if (h < 1) throw std::domain_error("convolution power requires h >= 1");
  if (max_support < h) max_support = h;
  if (max_support > kSupportBudget)
    throw resource_error("convolution support exceeds memory budget");
  return finish(power(law, h, max_support), h);
}

PmfTable convolve_power(const SamplingLaw& law, std::int64_t h,
                        double cutoff_mass) {
  if (h < 1) throw std::domain_error("convolution power requires h >= 1");
  if (!(cutoff_mass > 0.0) || cutoff_mass > 1e-8)
    throw std::domain_error("cutoff_mass must lie in (0, 1e-8]");

  std::int64_t guess = h + 1;
  switch (law.kind()) {
    case LawKind::Dirac:
      return convolve_power_capped(law, h, law.dirac_k() * h);
    case LawKind::Table:
      guess = static_cast<std::int64_t>(law.table_pmf().size()) * h;
      break;
    case LawKind::ParetoTail: {
      // beyond the bulk, P(T_h > J) ~ h J^{1-gamma}
      double g = law.pareto_gamma();
      double j0 = std::pow(2.0 * static_cast<double>(h) / cutoff_mass,
                           1.0 / (g - 1.0));
      guess = std::max<std::int64_t>(4 * h, static_cast<std::int64_t>(j0));
      break;
    }
  }
  for (;;) {
    if (guess > kSupportBudget)
      throw resource_error(
          "convolve_power: cutoff unreachable within memory budget");
    PmfTable t = convolve_power_capped(law, h, guess);
    if (t.tail_mass <= cutoff_mass) return t;
    guess *= 2;
  }
}

// --- characteristic function -------------------------------------------------

CharFnEvaluator::CharFnEvaluator(const SamplingLaw& law, double tol)
    : law_(law), tol_(tol) {
  if (law_.kind() == LawKind::ParetoTail) {
    s_ = law_.pareto_gamma() - 1.0;
    use_polylog_ = std::abs(s_ - std::round(s_)) > 0.02;
    if (use_polylog_) {
      zeta_.resize(128);
      for (std::size_t k = 0; k < zeta_.size(); ++k)
        zeta_[k] = std::riemann_zeta(s_ - static_cast<double>(k));
    }
  }
}

std::complex<double> CharFnEvaluator::polylog(double lambda) const {
  // Li_s(e^{i lam}) = Gamma(1-s) (-i lam)^{s-1} + sum_k zeta(s-k) (i lam)^k/k!
  const std::complex<double> i(0.0, 1.0);
  std::complex<double> lead =
      std::tgamma(1.0 - s_) * std::pow(lambda, s_ - 1.0) *
      std::exp(std::complex<double>(0.0, -kPi * (s_ - 1.0) / 2.0));
  std::complex<double> sum = 0.0;
  std::complex<double> p = 1.0;  // (i lam)^k / k!
  const std::complex<double> ilam = i * lambda;
  for (std::size_t k = 0; k < zeta_.size(); ++k) {
    std::complex<double> term = zeta_[k] * p;
    sum += term;
    p *= ilam / static_cast<double>(k + 1);
    if (k > 8 && std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) break;
  }
  return lead + sum;
}

std::complex<double> CharFnEvaluator::direct(double lambda,
                                             double* trunc) const {
  // direct sum plus a tail accelerated by repeated Abel summation; used when
  // gamma-1 is (near) integer so the Hurwitz expansion degenerates
  const double g = law_.pareto_gamma();
  const std::complex<double> i(0.0, 1.0);
  double nd = std::max(5000.0, 50.0 * (s_ + 2.0) / std::max(lambda, 1e-12));
  const std::int64_t n = static_cast<std::int64_t>(std::min(nd, 5e7));
  const std::complex<double> rot = std::exp(i * lambda);
  std::complex<double> z = rot;  // e^{i j lam}
  std::complex<double> sum = 0.0;
  double prev = 1.0;
  for (std::int64_t j = 1; j <= n; ++j) {
    double next = pareto_tail(g, static_cast<double>(j + 1));
    sum += (prev - next) * z;
    prev = next;
    z *= rot;
  }
  // tail sum_{j>=m0} c_j z^j with c_j = S(j): K passes of
  //   T_k(M) = (d_k(M) z^M + T_{k+1}(M+1)) / (1-z),  d_{k+1} = diff(d_k),
  // shrink the coefficients to ~ j^{-s-K}; the deepest series is summed
  // directly. Unrolled:
  //   T_0(m0) = sum_k d_k(m0+k) z^{m0+k} (1-z)^{-(k+1)}
  //           + (1-z)^{-K} sum_{j>=m0+K} d_K(j) z^j.
  const int depth = 4;
  const long len = 4000;
  const std::int64_t m0 = n + 1;
  const std::complex<double> zm = z;  // continues the head recursion: rot^m0
  std::vector<std::complex<double>> d(static_cast<std::size_t>(len));
  for (long j = 0; j < len; ++j) {
    double x = static_cast<double>(m0 + j);
    d[static_cast<std::size_t>(j)] =
        pareto_tail(g, x) - pareto_tail(g, x + 1.0);
  }
  const std::complex<double> one_minus_z = 1.0 - rot;
  std::complex<double> tail_sum = 0.0;
  std::complex<double> zk = zm;                         // rot^{m0+k}
  std::complex<double> scale = 1.0 / one_minus_z;       // (1-z)^{-(k+1)}
  for (int k = 0; k < depth; ++k) {
    tail_sum += d[static_cast<std::size_t>(k)] * zk * scale;
    for (long j = len - 1; j > k; --j)
      d[static_cast<std::size_t>(j)] -= d[static_cast<std::size_t>(j - 1)];
    zk *= rot;
    scale /= one_minus_z;
  }
  // scale is now (1-z)^{-(depth+1)}; the direct part needs (1-z)^{-depth}
  std::complex<double> zj = zk;  // rot^{m0+depth}
  std::complex<double> rest = 0.0;
  for (long j = depth; j < len; ++j) {
    rest += d[static_cast<std::size_t>(j)] * zj;
    zj *= rot;
  }
  tail_sum += rest * scale * one_minus_z;
  double last = std::abs(d[static_cast<std::size_t>(len - 1)]);
  double remainder = last * static_cast<double>(m0 + len) /
                     (s_ + static_cast<double>(depth) - 1.0) /
                     std::pow(std::abs(one_minus_z),
                              static_cast<double>(depth));
  *trunc = remainder + 1e-16 * static_cast<double>(len);
  return sum + tail_sum;
}

CharFnValue CharFnEvaluator::operator()(double lambda) const {
  CharFnValue out;
  if (std::abs(lambda) > kPi + 1e-12)
    throw std::domain_error("char_fn argument must lie in [-pi, pi]");
  if (lambda == 0.0) {
    out.value = 1.0;
    out.rho = 1.0;
    out.tau = 0.0;
    return out;
  }
  bool neg = lambda < 0.0;
  double lam = std::abs(lambda);
  std::complex<double> v;
  switch (law_.kind()) {
    case LawKind::Dirac: {
      v = std::exp(std::complex<double>(0.0, lam * law_.dirac_k()));
      out.trunc_error = 0.0;
      break;
    }
    case LawKind::Table: {
      const auto& p = law_.table_pmf();
      const std::complex<double> rot =
          std::exp(std::complex<double>(0.0, lam));
      std::complex<double> z = rot, sum = 0.0;
      for (double pj : p) {
        sum += pj * z;
        z *= rot;
      }
      v = sum;
      out.trunc_error = 0.0;
      break;
    }
    case LawKind::ParetoTail: {
      if (use_polylog_) {
        std::complex<double> li = polylog(lam);
        v = 1.0 + (1.0 - std::exp(std::complex<double>(0.0, -lam))) * li;
        out.trunc_error = 1e-14 * (1.0 + std::abs(li) * lam);
      } else {
        double trunc = 0.0;
        v = direct(lam, &trunc);
        out.trunc_error = trunc;
      }
      break;
    }
  }
  if (neg) v = std::conj(v);
  out.value = v;
  out.rho = std::min(std::abs(v), 1.0);
  out.tau = std::arg(v);
  return out;
}

CharFnValue char_fn(const SamplingLaw& law, double lambda, double tol) {
  CharFnEvaluator eval(law, tol);
  return eval(lambda);
}

RandomWalkPath walk(const SamplingLaw& law, std::int64_t n,
                    std::uint64_t seed) {
  if (n < 0) throw std::domain_error("walk length must be >= 0");
  RandomWalkPath path;
  path.seed = seed;
  path.times.resize(static_cast<std::size_t>(n) + 1);
  path.times[0] = 0;
  std::mt19937_64 rng(seed);
  for (std::int64_t j = 1; j <= n; ++j)
    path.times[static_cast<std::size_t>(j)] =
        path.times[static_cast<std::size_t>(j - 1)] + draw(law, rng);
  return path;
}

}  // namespace lmsamp::samplaw
