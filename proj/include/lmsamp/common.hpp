#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lmsamp {

inline constexpr const char* kVersion = "0.1.0";

/// Raised when a computation fails to reach its requested accuracy
/// (quadrature non-convergence, extrapolation diagnostics failing, ...).
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a computation would exceed its memory or work budget.
class resource_error : public std::runtime_error {
 public:
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// --- deterministic seed derivation -----------------------------------------

/// splitmix64 avalanche step.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from (master seed, stream index, purpose
/// tag). Used by the Monte Carlo harness so replications are reproducible
/// under any parallel schedule.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t tag) {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ (0x9e3779b97f4a7c15ULL + stream));
  h = mix64(h ^ (0xc2b2ae3d27d4eb4fULL + tag));
  return h;
}

// purpose tags for derive_seed
inline constexpr std::uint64_t kTagNoise = 1;
inline constexpr std::uint64_t kTagWalk = 2;
inline constexpr std::uint64_t kTagRetry = 3;

// --- deterministic summation ------------------------------------------------

/// Pairwise (tree) summation. Deterministic for a given input order and far
/// more accurate than naive accumulation on long sequences.
double pairwise_sum(std::span<const double> x);

/// Mean and (unbiased) standard deviation via pairwise sums.
struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};
MeanSd mean_sd(std::span<const double> x);

// --- misc -------------------------------------------------------------------

/// Least-squares line fit y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t n_used = 0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Number of worker threads to use: explicit request, else the
/// LMSAMP_THREADS environment variable, else hardware concurrency.
unsigned resolve_threads(int requested = 0);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Blocks until done.
/// Work is split in fixed-size chunks so numeric results do not depend on the
/// number of threads.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace lmsamp
