#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace propest {

struct PopulationUnit {
  int phi = 0;     // attribute indicator, 0 or 1
  double x = 0.0;  // auxiliary measurement
};

/// Immutable finite population of N >= 2 validated units.
class Population {
 public:
  /// Throws EmptyPopulation if fewer than two units, ValidationError on a
  /// unit with phi outside {0, 1} or non-finite x.
  explicit Population(std::vector<PopulationUnit> units);

  std::size_t size() const noexcept { return units_.size(); }
  std::span<const PopulationUnit> units() const noexcept { return units_; }
  const PopulationUnit& operator[](std::size_t i) const { return units_[i]; }

  std::size_t attribute_count() const noexcept { return attribute_count_; }

  /// True iff 0 < sum(phi) < N and x is not constant.
  bool nondegenerate() const noexcept { return nondegenerate_; }

 private:
  std::vector<PopulationUnit> units_;
  std::size_t attribute_count_ = 0;
  bool nondegenerate_ = false;
};

struct PopulationSummary {
  std::size_t N = 0;
  double P = 0.0;          // population proportion
  double x_bar_pop = 0.0;  // population mean of x
  double s_p_sq = 0.0;     // attribute variance, divisor N-1
  double s_x_sq = 0.0;     // auxiliary variance, divisor N-1
  double s_phix = 0.0;     // covariance, divisor N-1
  double rho_pb = 0.0;     // point-biserial correlation
  double c_p = 0.0;
  double c_x = 0.0;
};

struct SampleSummary {
  double p = 0.0;
  double x_bar = 0.0;
  std::size_t n = 0;
};

struct SampleDeviation {
  double e_phi = 0.0;
  double e_x = 0.0;
};

/// Population moments with N-1 divisors. The result does not depend on the
/// order of the units.
PopulationSummary summarize_population(const Population& pop);

PopulationSummary summarize_population(std::span<const PopulationUnit> units);

SampleSummary summarize_sample(std::span<const PopulationUnit> units);

/// Finite-population factor 1/n - 1/N.
double fpc(std::size_t n, std::size_t N);

SampleDeviation sample_deviation(const SampleSummary& sample, const PopulationSummary& pop);

}  // namespace propest
