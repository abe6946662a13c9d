#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lmsamp {

enum class CovProvenance { Exact, MonteCarlo, Empirical };

/// Lag-indexed covariance sequence (lags 0..H) with provenance.
struct CovSeq {
  std::vector<double> values;
  CovProvenance provenance = CovProvenance::Exact;
  long mc_reps = 0;          // MonteCarlo only
  std::vector<double> se;    // MonteCarlo only, per lag
  long emp_n = 0;            // Empirical only
  std::string model;

  std::size_t max_lag() const { return values.empty() ? 0 : values.size() - 1; }
  double at(std::size_t h) const { return values.at(h); }
};

}  // namespace lmsamp
