#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "propest/estimators.hpp"
#include "propest/population.hpp"
#include "propest/rng.hpp"

namespace propest {

enum class EstimatorKind { usual, t1, t2, t3, regression };

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::usual;
  std::variant<std::monostate, T2Instance, T3Params, double> params;
  std::string label;
  bool clamp = false;

  static EstimatorSpec usual();
  static EstimatorSpec t1();
  static EstimatorSpec t2(const T2Instance& inst, std::string label = {});
  static EstimatorSpec t3(const T3Params& params, std::string label = {});
  static EstimatorSpec regression(double b_coef, std::string label = {});

  /// Throws ValidationError if the parameters do not match the kind.
  void validate() const;

  double estimate(const SampleSummary& s, double x_bar_pop) const;
};

struct EmpiricalStats {
  std::string label;
  double mean = 0.0;
  double bias = 0.0;
  double mse = 0.0;
  double mse_se = 0.0;  // Monte Carlo standard error of mse
  std::optional<double> pre;  // vs the usual estimator; empty when mse == 0
};

struct EmpiricalReport {
  std::vector<EmpiricalStats> estimators;
  double usual_mse = 0.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
};

/// Exact first and second moments of the relative deviations and of p.
struct DeviationMoments {
  double e_phi = 0.0;
  double e_x = 0.0;
  double e_phi_sq = 0.0;
  double e_x_sq = 0.0;
  double e_phi_x = 0.0;
  double p_mean = 0.0;
  double p_var = 0.0;
};

struct ExactStats {
  std::string label;
  double expectation = 0.0;
  double bias = 0.0;
  double mse = 0.0;
};

struct ExactReport {
  std::vector<ExactStats> estimators;
  DeviationMoments deviations;
  std::uint64_t sample_count = 0;
};

struct SyntheticSpec {
  std::size_t N = 200;
  double target_p = 0.5;
  double target_rho = 0.0;
  double x_mean = 100.0;   // overall mean of x
  double x_spread = 10.0;  // within-class standard deviation
  std::uint64_t seed = 0;
};

inline constexpr std::uint64_t kDefaultEnumerationLimit = 2'000'000;

/// C(N, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t N, std::uint64_t k) noexcept;

/// Partial Fisher-Yates over 0..N-1; returns n distinct indices in draw order.
std::vector<std::size_t> draw_srswor_indices(std::size_t N, std::size_t n, Rng& rng);

/// Uses Rng::substream(seed, 0), so the result equals replicate 0 of monte_carlo.
std::vector<PopulationUnit> draw_srswor(const Population& pop, std::size_t n, std::uint64_t seed);

/// Replicate r draws with Rng::substream(seed, r). Output is bit-identical for
/// any thread count; threads == 0 picks the hardware concurrency.
EmpiricalReport monte_carlo(const Population& pop, std::size_t n, std::size_t reps,
                            std::span<const EstimatorSpec> specs, std::uint64_t seed,
                            unsigned threads = 0);

/// Every size-n subset in lexicographic order, equally weighted.
ExactReport enumerate_exact(const Population& pop, std::size_t n, std::span<const EstimatorSpec> specs,
                            std::uint64_t limit = kDefaultEnumerationLimit);

/// Two-class auxiliary model: x = class mean + within-class noise, with the
/// class-mean gap set so the finite population hits target_rho.
Population generate_population(const SyntheticSpec& spec);

}  // namespace propest
