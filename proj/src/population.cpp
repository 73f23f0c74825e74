#include "propest/population.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "propest/detail/kahan.hpp"
#include "propest/errors.hpp"

namespace propest {

namespace {

void validate_unit(const PopulationUnit& u, std::size_t index) {
  if (u.phi != 0 && u.phi != 1)
    throw ValidationError("unit " + std::to_string(index) + ": phi must be 0 or 1, got " +
                          std::to_string(u.phi));
  if (!std::isfinite(u.x))
    throw ValidationError("unit " + std::to_string(index) + ": x is not finite");
}

}  // namespace

Population::Population(std::vector<PopulationUnit> units) : units_(std::move(units)) {
  if (units_.size() < 2)
    throw EmptyPopulation("population needs at least 2 units, got " + std::to_string(units_.size()));
  bool x_varies = false;
  for (std::size_t i = 0; i < units_.size(); ++i) {
    validate_unit(units_[i], i);
    attribute_count_ += static_cast<std::size_t>(units_[i].phi);
    if (units_[i].x != units_[0].x) x_varies = true;
  }
  nondegenerate_ = attribute_count_ > 0 && attribute_count_ < units_.size() && x_varies;
}

PopulationSummary summarize_population(const Population& pop) {
  return summarize_population(pop.units());
}

PopulationSummary summarize_population(std::span<const PopulationUnit> units) {
  const std::size_t N = units.size();
  if (N < 2) throw EmptyPopulation("population needs at least 2 units, got " + std::to_string(N));

  // Canonical order makes every sum below independent of the input order.
  std::vector<PopulationUnit> sorted(units.begin(), units.end());
  for (std::size_t i = 0; i < N; ++i) validate_unit(sorted[i], i);
  std::sort(sorted.begin(), sorted.end(), [](const PopulationUnit& a, const PopulationUnit& b) {
    return a.phi != b.phi ? a.phi < b.phi : a.x < b.x;
  });

  std::size_t count = 0;
  detail::CompensatedSum sum_x;
  for (const auto& u : sorted) {
    count += static_cast<std::size_t>(u.phi);
    sum_x += u.x;
  }
  if (count == 0 || count == N)
    throw DegeneratePopulation("attribute is constant (" + std::to_string(count) + " of " +
                               std::to_string(N) + " units)");
  if (std::all_of(sorted.begin(), sorted.end(), [&](const auto& u) { return u.x == sorted.front().x; }))
    throw DegeneratePopulation("auxiliary variable is constant");

  const double n_total = static_cast<double>(N);
  const double P = static_cast<double>(count) / n_total;
  const double x_bar = sum_x.value() / n_total;

  detail::CompensatedSum ss_p, ss_x, sp_px;
  for (const auto& u : sorted) {
    const double dp = static_cast<double>(u.phi) - P;
    const double dx = u.x - x_bar;
    ss_p += dp * dp;
    ss_x += dx * dx;
    sp_px += dp * dx;
  }

  PopulationSummary s;
  s.N = N;
  s.P = P;
  s.x_bar_pop = x_bar;
  s.s_p_sq = ss_p.value() / (n_total - 1.0);
  s.s_x_sq = ss_x.value() / (n_total - 1.0);
  s.s_phix = sp_px.value() / (n_total - 1.0);
  if (!(s.s_x_sq > 0.0)) throw DegeneratePopulation("auxiliary variance is zero");
  s.rho_pb = s.s_phix / (std::sqrt(s.s_p_sq) * std::sqrt(s.s_x_sq));
  s.rho_pb = std::clamp(s.rho_pb, -1.0, 1.0);
  s.c_p = std::sqrt(s.s_p_sq) / P;
  s.c_x = std::sqrt(s.s_x_sq) / std::fabs(x_bar);
  return s;
}

SampleSummary summarize_sample(std::span<const PopulationUnit> units) {
  if (units.empty()) throw EmptySample("sample has no units");
  std::size_t count = 0;
  detail::CompensatedSum sum_x;
  for (std::size_t i = 0; i < units.size(); ++i) {
    validate_unit(units[i], i);
    count += static_cast<std::size_t>(units[i].phi);
    sum_x += units[i].x;
  }
  const double n = static_cast<double>(units.size());
  return SampleSummary{static_cast<double>(count) / n, sum_x.value() / n, units.size()};
}

double fpc(std::size_t n, std::size_t N) {
  if (n == 0 || n > N)
    throw InvalidDesign("sample size " + std::to_string(n) + " must be in [1, " + std::to_string(N) + "]");
  if (n == N) return 0.0;
  return 1.0 / static_cast<double>(n) - 1.0 / static_cast<double>(N);
}

SampleDeviation sample_deviation(const SampleSummary& sample, const PopulationSummary& pop) {
  if (pop.P == 0.0) throw UndefinedDeviation("population proportion is zero");
  if (pop.x_bar_pop == 0.0) throw UndefinedDeviation("population mean of x is zero");
  return SampleDeviation{(sample.p - pop.P) / pop.P, (sample.x_bar - pop.x_bar_pop) / pop.x_bar_pop};
}

}  // namespace propest
