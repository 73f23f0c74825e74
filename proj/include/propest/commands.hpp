#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "propest/errors.hpp"
#include "propest/io.hpp"
#include "propest/moments.hpp"
#include "propest/report.hpp"
#include "propest/sampling.hpp"

namespace propest {

/// (alpha, beta, a, b) of a t3 member; q1 and q2 are always set optimally.
struct T3Setting {
  double alpha = 0.0;
  double beta = 0.0;
  double a = 1.0;
  double b = 0.0;

  std::string label() const;
};

/// Parses "alpha=A,beta=B[,a=A0][,b=B0]".
T3Setting parse_t3_setting(const std::string& text);

/// Home-ownership vs income statistics: n=11, N=40, P=0.525, X=14.4,
/// rho=0.897, C_p=0.963, C_x=0.3085.
SummaryInput table1_fixture();

/// (alpha, beta) = (1,1), (1,0), (0,1) with a = 1, b = 0.
std::vector<T3Setting> table1_t3_settings();

/// Published PRE of usual, t1, t2, t3(1,1), t3(1,0), t3(0,1).
inline constexpr std::array<double, 6> kTable1Pre = {100.0, 189.384, 511.794, 515.798, 517.950, 518.052};
inline constexpr double kTable1RelativeTolerance = 0.01;

/// Estimators evaluated by every command: usual, t1, the exponential t2
/// member with optimal H1, optionally the regression estimator with the
/// optimal slope, and one optimal t3 per setting. `rows` carry first-order
/// theory; `specs` are the matching point estimators.
struct Lineup {
  std::vector<EstimatorSpec> specs;
  std::vector<ReportRow> rows;
};

Lineup build_lineup(const DesignMoments& dm, std::span<const T3Setting> settings, bool with_regression);

Report cmd_table1();
Report cmd_theory(const SummaryInput& summary, std::span<const T3Setting> settings);

struct SimulateOptions {
  std::size_t n = 0;
  std::size_t reps = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::vector<T3Setting> settings;
};

Report cmd_simulate(const Population& pop, const SimulateOptions& options);

Report cmd_enumerate(const Population& pop, std::size_t n, std::span<const T3Setting> settings,
                     std::uint64_t limit = kDefaultEnumerationLimit);

struct GenerateResult {
  Population population;
  PopulationSummary summary;
  Report report;
};

/// Generates, writes the CSV to `out_path`, and reports the achieved statistics.
GenerateResult cmd_generate(const SyntheticSpec& spec, const std::filesystem::path& out_path);

/// 0 success, 2 validation/parse, 3 numerical, 4 resource, 1 I/O or other.
int exit_code(ErrorCategory category) noexcept;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace propest
