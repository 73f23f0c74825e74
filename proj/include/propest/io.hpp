#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "propest/population.hpp"

namespace propest {

/// The seven published design/population statistics.
struct SummaryInput {
  std::size_t n = 0;
  std::size_t N = 0;
  double P = 0.0;
  double x_bar = 0.0;
  double rho = 0.0;
  double c_p = 0.0;
  double c_x = 0.0;
};

/// Throws ValidationError naming the first violated constraint.
void validate(const SummaryInput& input);

/// Population-level quantities implied by the statistics
/// (S_phi = C_p P, S_x = C_x X_bar, S_phix = rho S_phi S_x).
PopulationSummary to_population_summary(const SummaryInput& input);

/// CSV with header `phi,x`. Rejects degenerate populations.
Population read_population_csv(std::istream& in);
Population load_population_csv(const std::filesystem::path& path);

/// x is written with 17 significant digits so a reload is exact.
void write_population_csv(std::ostream& out, const Population& pop);
void save_population_csv(const std::filesystem::path& path, const Population& pop);

/// Flat JSON object with exactly the keys n, N, P, x_bar, rho, c_p, c_x.
SummaryInput parse_summary_json(const std::string& text);
SummaryInput load_summary_json(const std::filesystem::path& path);

}  // namespace propest
