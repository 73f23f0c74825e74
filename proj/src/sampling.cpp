#include "propest/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "propest/detail/kahan.hpp"
#include "propest/errors.hpp"

namespace propest {

// ---------------------------------------------------------------------------
// EstimatorSpec

EstimatorSpec EstimatorSpec::usual() { return EstimatorSpec{EstimatorKind::usual, {}, "usual", false}; }

EstimatorSpec EstimatorSpec::t1() { return EstimatorSpec{EstimatorKind::t1, {}, "t1", false}; }

EstimatorSpec EstimatorSpec::t2(const T2Instance& inst, std::string label) {
  if (label.empty()) label = "t2(" + std::string(to_string(inst.family())) + ")";
  return EstimatorSpec{EstimatorKind::t2, inst, std::move(label), false};
}

EstimatorSpec EstimatorSpec::t3(const T3Params& params, std::string label) {
  propest::validate(params);
  if (label.empty()) label = "t3";
  return EstimatorSpec{EstimatorKind::t3, params, std::move(label), false};
}

EstimatorSpec EstimatorSpec::regression(double b_coef, std::string label) {
  if (label.empty()) label = "regression";
  return EstimatorSpec{EstimatorKind::regression, b_coef, std::move(label), false};
}

void EstimatorSpec::validate() const {
  bool ok = false;
  switch (kind) {
    case EstimatorKind::usual:
    case EstimatorKind::t1: ok = std::holds_alternative<std::monostate>(params); break;
    case EstimatorKind::t2: ok = std::holds_alternative<T2Instance>(params); break;
    case EstimatorKind::t3: ok = std::holds_alternative<T3Params>(params); break;
    case EstimatorKind::regression: ok = std::holds_alternative<double>(params); break;
  }
  if (!ok) throw ValidationError("estimator '" + label + "' has parameters that do not match its kind");
}

double EstimatorSpec::estimate(const SampleSummary& s, double x_bar_pop) const {
  double value = 0.0;
  switch (kind) {
    case EstimatorKind::usual: value = est_usual(s); break;
    case EstimatorKind::t1: value = est_t1(s, x_bar_pop); break;
    case EstimatorKind::t2: value = est_t2(std::get<T2Instance>(params), s, x_bar_pop); break;
    case EstimatorKind::t3: value = est_t3(std::get<T3Params>(params), s, x_bar_pop); break;
    case EstimatorKind::regression: value = est_regression(s, x_bar_pop, std::get<double>(params)); break;
  }
  return clamp ? clamp_unit(value) : value;
}

// ---------------------------------------------------------------------------
// Draws

std::uint64_t binomial(std::uint64_t N, std::uint64_t k) noexcept {
  if (k > N) return 0;
  k = std::min(k, N - k);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (N - k + i) / i stays integral at every step.
    result = result * (N - k + i) / i;
    if (result > kMax) return kMax;
  }
  return static_cast<std::uint64_t>(result);
}

namespace {

void check_design(std::size_t n, std::size_t N) {
  if (n == 0 || n > N)
    throw InvalidDesign("sample size " + std::to_string(n) + " must be in [1, " + std::to_string(N) + "]");
}

// Draws n indices into perm[0..n) and returns the swap targets so the caller
// can restore perm to its previous state.
void partial_shuffle(std::vector<std::size_t>& perm, std::size_t n, Rng& rng,
                     std::vector<std::size_t>& swaps) {
  const std::size_t N = perm.size();
  swaps.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(N - i));
    swaps[i] = j;
    std::swap(perm[i], perm[j]);
  }
}

void undo_shuffle(std::vector<std::size_t>& perm, const std::vector<std::size_t>& swaps) {
  for (std::size_t i = swaps.size(); i-- > 0;) std::swap(perm[i], perm[swaps[i]]);
}

SampleSummary summarize_indices(const Population& pop, std::span<const std::size_t> idx) {
  std::size_t count = 0;
  double sum_x = 0.0;
  for (std::size_t i : idx) {
    count += static_cast<std::size_t>(pop[i].phi);
    sum_x += pop[i].x;
  }
  const double n = static_cast<double>(idx.size());
  return SampleSummary{static_cast<double>(count) / n, sum_x / n, idx.size()};
}

struct Accumulator {
  detail::CompensatedSum estimate, sq_error, quad_error;

  void add(double value, double truth) {
    const double err = value - truth;
    estimate += value;
    sq_error += err * err;
    quad_error += err * err * err * err;
  }

  void merge(const Accumulator& other) {
    estimate.merge(other.estimate);
    sq_error.merge(other.sq_error);
    quad_error.merge(other.quad_error);
  }
};

struct Failure {
  std::size_t replicate = std::numeric_limits<std::size_t>::max();
  std::string message;
  std::vector<std::size_t> subset;
};

constexpr std::size_t kBlockSize = 1024;

}  // namespace

std::vector<std::size_t> draw_srswor_indices(std::size_t N, std::size_t n, Rng& rng) {
  check_design(n, N);
  std::vector<std::size_t> perm(N), swaps;
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  partial_shuffle(perm, n, rng, swaps);
  perm.resize(n);
  return perm;
}

std::vector<PopulationUnit> draw_srswor(const Population& pop, std::size_t n, std::uint64_t seed) {
  Rng rng = Rng::substream(seed, 0);
  std::vector<PopulationUnit> sample;
  sample.reserve(n);
  for (std::size_t i : draw_srswor_indices(pop.size(), n, rng)) sample.push_back(pop[i]);
  return sample;
}

// ---------------------------------------------------------------------------
// Monte Carlo

EmpiricalReport monte_carlo(const Population& pop, std::size_t n, std::size_t reps,
                            std::span<const EstimatorSpec> specs, std::uint64_t seed, unsigned threads) {
  check_design(n, pop.size());
  if (reps == 0) throw ValidationError("replicate count must be at least 1");
  for (const auto& s : specs) s.validate();

  const PopulationSummary summary = summarize_population(pop);
  const double P = summary.P, X = summary.x_bar_pop;
  const std::size_t k = specs.size();
  const std::size_t blocks = (reps + kBlockSize - 1) / kBlockSize;

  // Slot k holds the usual estimator, used as the PRE reference.
  std::vector<std::vector<Accumulator>> partial(blocks, std::vector<Accumulator>(k + 1));
  std::atomic<std::size_t> next_block{0};
  std::atomic<bool> failed{false};
  Failure failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    std::vector<std::size_t> perm(pop.size()), swaps;
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (;;) {
      const std::size_t b = next_block.fetch_add(1);
      // Blocks are claimed in order, so stopping here never hides a failure
      // with a lower replicate index.
      if (b >= blocks || failed.load()) return;
      auto& acc = partial[b];
      const std::size_t end = std::min(reps, (b + 1) * kBlockSize);
      for (std::size_t r = b * kBlockSize; r < end; ++r) {
        Rng rng = Rng::substream(seed, r);
        partial_shuffle(perm, n, rng, swaps);
        const auto sample = summarize_indices(pop, std::span(perm).first(n));
        try {
          for (std::size_t j = 0; j < k; ++j) acc[j].add(specs[j].estimate(sample, X), P);
        } catch (const Error& e) {
          std::lock_guard lock(failure_mutex);
          if (r < failure.replicate) {
            failure.replicate = r;
            failure.message = e.what();
            failure.subset.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n));
            std::sort(failure.subset.begin(), failure.subset.end());
          }
          failed.store(true);
          undo_shuffle(perm, swaps);
          return;
        }
        acc[k].add(sample.p, P);
        undo_shuffle(perm, swaps);
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, blocks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  if (failed.load()) throw EstimatorDomainError(failure.message, failure.replicate, failure.subset);

  std::vector<Accumulator> total(k + 1);
  for (const auto& block : partial)
    for (std::size_t j = 0; j <= k; ++j) total[j].merge(block[j]);

  const double count = static_cast<double>(reps);
  EmpiricalReport report;
  report.reps = reps;
  report.seed = seed;
  report.usual_mse = total[k].sq_error.value() / count;
  for (std::size_t j = 0; j < k; ++j) {
    EmpiricalStats st;
    st.label = specs[j].label;
    st.mean = total[j].estimate.value() / count;
    st.bias = st.mean - P;
    st.mse = total[j].sq_error.value() / count;
    const double fourth = total[j].quad_error.value() / count;
    st.mse_se = reps > 1 ? std::sqrt(std::max(0.0, fourth - st.mse * st.mse) / (count - 1.0)) : 0.0;
    if (st.mse > 0.0) st.pre = 100.0 * report.usual_mse / st.mse;
    report.estimators.push_back(std::move(st));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Exact enumeration

ExactReport enumerate_exact(const Population& pop, std::size_t n, std::span<const EstimatorSpec> specs,
                            std::uint64_t limit) {
  const std::size_t N = pop.size();
  check_design(n, N);
  for (const auto& s : specs) s.validate();
  const std::uint64_t total_count = binomial(N, n);
  if (total_count > limit)
    throw TooManySamples("C(" + std::to_string(N) + "," + std::to_string(n) + ") = " +
                         std::to_string(total_count) + " exceeds the limit " + std::to_string(limit));

  const PopulationSummary summary = summarize_population(pop);
  const double P = summary.P, X = summary.x_bar_pop;
  const std::size_t k = specs.size();

  std::vector<detail::CompensatedSum> est_sum(k), sq_sum(k);
  detail::CompensatedSum e_phi, e_x, e_phi_sq, e_x_sq, e_phi_x, p_sum, p_sq;

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::uint64_t ordinal = 0;; ++ordinal) {
    const auto sample = summarize_indices(pop, idx);
    const auto dev = sample_deviation(sample, summary);
    e_phi += dev.e_phi;
    e_x += dev.e_x;
    e_phi_sq += dev.e_phi * dev.e_phi;
    e_x_sq += dev.e_x * dev.e_x;
    e_phi_x += dev.e_phi * dev.e_x;
    p_sum += sample.p;
    p_sq += (sample.p - P) * (sample.p - P);

    for (std::size_t j = 0; j < k; ++j) {
      double value = 0.0;
      try {
        value = specs[j].estimate(sample, X);
      } catch (const Error& e) {
        throw EstimatorDomainError(e.what(), static_cast<std::size_t>(ordinal), idx);
      }
      est_sum[j] += value;
      sq_sum[j] += (value - P) * (value - P);
    }

    // Advance to the next combination in lexicographic order.
    std::size_t i = n;
    while (i > 0 && idx[i - 1] == N - n + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < n; ++j) idx[j] = idx[j - 1] + 1;
  }

  const double count = static_cast<double>(total_count);
  ExactReport report;
  report.sample_count = total_count;
  report.deviations = DeviationMoments{e_phi.value() / count,    e_x.value() / count,
                                       e_phi_sq.value() / count, e_x_sq.value() / count,
                                       e_phi_x.value() / count,  p_sum.value() / count,
                                       p_sq.value() / count};
  for (std::size_t j = 0; j < k; ++j) {
    ExactStats st;
    st.label = specs[j].label;
    st.expectation = est_sum[j].value() / count;
    st.bias = st.expectation - P;
    st.mse = sq_sum[j].value() / count;
    report.estimators.push_back(std::move(st));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Synthetic populations

Population generate_population(const SyntheticSpec& spec) {
  if (spec.N < 2) throw ValidationError("N must be at least 2");
  if (!(spec.target_p > 0.0 && spec.target_p < 1.0)) throw ValidationError("target P must lie in (0, 1)");
  if (!(std::fabs(spec.target_rho) < 1.0)) throw ValidationError("target rho must satisfy |rho| < 1");
  if (!(spec.x_spread > 0.0) || !std::isfinite(spec.x_spread) || !std::isfinite(spec.x_mean))
    throw ValidationError("x spread must be positive and x mean finite");

  const std::size_t N = spec.N;
  const auto count = static_cast<std::size_t>(std::llround(spec.target_p * static_cast<double>(N)));
  if (count == 0 || count == N)
    throw UnreachableTarget("N*P rounds to " + std::to_string(count) + "; both classes must be present");
  if (N < 3) throw UnreachableTarget("need at least 3 units for within-class spread");

  const double A = static_cast<double>(count), Nd = static_cast<double>(N);
  const double k = A * (Nd - A) / Nd;
  constexpr int kMaxAttempts = 16;
  constexpr double kRhoTolerance = 1e-6;

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng = Rng::substream(spec.seed, static_cast<std::uint64_t>(attempt));

    std::vector<int> phi(N, 0);
    std::fill(phi.begin(), phi.begin() + static_cast<std::ptrdiff_t>(count), 1);
    for (std::size_t i = N - 1; i > 0; --i) std::swap(phi[i], phi[rng.below(i + 1)]);

    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> resid(N);
    double class_sum[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < N; ++i) {
      resid[i] = noise(rng);
      class_sum[phi[i]] += resid[i];
    }
    const double class_mean[2] = {class_sum[0] / (Nd - A), class_sum[1] / A};
    double ss_within = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      resid[i] -= class_mean[phi[i]];
      ss_within += resid[i] * resid[i];
    }
    if (!(ss_within > 0.0)) continue;

    // Pooled within-class variance x_spread^2, then the class gap that makes
    // rho = gap sqrt(k) / sqrt(SS_within + gap^2 k).
    const double scale = spec.x_spread * std::sqrt((Nd - 2.0) / ss_within);
    ss_within *= scale * scale;
    const double rho = spec.target_rho;
    const double gap = rho * std::sqrt(ss_within / (k * (1.0 - rho * rho)));
    const double mean0 = spec.x_mean - (A / Nd) * gap;

    std::vector<PopulationUnit> units(N);
    for (std::size_t i = 0; i < N; ++i)
      units[i] = PopulationUnit{phi[i], mean0 + (phi[i] ? gap : 0.0) + scale * resid[i]};

    Population pop(std::move(units));
    if (!pop.nondegenerate()) continue;
    if (std::fabs(summarize_population(pop).rho_pb - rho) <= kRhoTolerance) return pop;
  }
  throw UnreachableTarget("could not reach rho = " + std::to_string(spec.target_rho) + " after " +
                          std::to_string(kMaxAttempts) + " attempts");
}

}  // namespace propest
