#include "propest/commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

namespace propest {

std::string T3Setting::label() const {
  return fmt::format("t3(alpha={:g},beta={:g},a={:g},b={:g})", alpha, beta, a, b);
}

T3Setting parse_t3_setting(const std::string& text) {
  T3Setting setting;
  bool have_alpha = false, have_beta = false;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ValidationError("t3 setting item '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    const std::string raw = item.substr(eq + 1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc{} || ptr != raw.data() + raw.size() || raw.empty() || !std::isfinite(value))
      throw ValidationError("t3 setting '" + key + "' has invalid value '" + raw + "'");
    if (key == "alpha") {
      setting.alpha = value;
      have_alpha = true;
    } else if (key == "beta") {
      setting.beta = value;
      have_beta = true;
    } else if (key == "a") {
      setting.a = value;
    } else if (key == "b") {
      setting.b = value;
    } else {
      throw ValidationError("unknown t3 setting key '" + key + "'");
    }
  }
  if (!have_alpha || !have_beta) throw ValidationError("t3 setting needs both alpha and beta");
  validate(T3Params{1.0, 0.0, setting.alpha, setting.beta, setting.a, setting.b});
  return setting;
}

SummaryInput table1_fixture() { return SummaryInput{11, 40, 0.525, 14.4, 0.897, 0.963, 0.3085}; }

std::vector<T3Setting> table1_t3_settings() {
  return {T3Setting{1, 1, 1, 0}, T3Setting{1, 0, 1, 0}, T3Setting{0, 1, 1, 0}};
}

// ---------------------------------------------------------------------------

namespace {

void set_pre(ReportRow& row, double census_factor, double reference_mse) {
  if (census_factor == 0.0) {
    row.note = "census";
    return;
  }
  if (*row.mse > 0.0)
    row.pre = pre(reference_mse, *row.mse);
  else
    row.note = "zero MSE";
}

ReportRow theory_row(std::string label, double bias, double mse) {
  ReportRow row;
  row.label = std::move(label);
  row.bias = bias;
  row.mse = mse;
  return row;
}

std::vector<std::string> design_lines(const DesignMoments& dm, std::size_t n) {
  const auto& s = dm.summary;
  return {
      fmt::format("n = {}, N = {}, f = {:.8g}", n, s.N, dm.f),
      fmt::format("P = {:.8g}, X_bar = {:.8g}", s.P, s.x_bar_pop),
      fmt::format("rho_pb = {:.8g}, C_p = {:.8g}, C_x = {:.8g}", s.rho_pb, s.c_p, s.c_x),
  };
}

}  // namespace

Lineup build_lineup(const DesignMoments& dm, std::span<const T3Setting> settings, bool with_regression) {
  const double P = dm.P();
  const double V = var_usual(dm);
  Lineup lineup;

  auto add = [&](EstimatorSpec spec, ReportRow row) {
    set_pre(row, dm.f, V);
    lineup.specs.push_back(std::move(spec));
    lineup.rows.push_back(std::move(row));
  };

  add(EstimatorSpec::usual(), theory_row("usual", 0.0, V));
  add(EstimatorSpec::t1(), theory_row("t1", bias_t1(dm), mse_t1(dm)));

  // Exponential member whose H1 equals the optimum: H1 = -delta P / 2.
  const double delta = -2.0 * opt_h1(dm) / P;
  const T2Instance t2(T2Family::exponential, delta, P);
  ReportRow t2_row = theory_row("t2", bias_t2(dm, t2), mse_t2(dm, t2.h1()));
  add(EstimatorSpec::t2(t2, "t2"), std::move(t2_row));
  if (lineup.rows.back().note.empty()) lineup.rows.back().note = fmt::format("exponential, delta={:.6g}", delta);

  if (with_regression) {
    add(EstimatorSpec::regression(optimal_regression_coef(dm.summary)),
        theory_row("regression", 0.0, min_mse_t2(dm)));
  }

  for (const auto& setting : settings) {
    if (dm.f == 0.0) {
      const T3Params params{1.0, 0.0, setting.alpha, setting.beta, setting.a, setting.b};
      add(EstimatorSpec::t3(params, setting.label()), theory_row(setting.label(), 0.0, 0.0));
      continue;
    }
    const auto coeffs = t3_coefficients(setting.alpha, setting.beta, setting.a, setting.b, dm.summary.x_bar_pop);
    const auto mc = m_components(dm, coeffs);
    OptimalQ q;
    double mse = 0.0;
    try {
      q = opt_q(mc);
      mse = min_mse_t3(P, mc);
    } catch (const SingularSystem& e) {
      throw SingularSystem(setting.label() + ": " + e.what());
    }
    const T3Params params{q.q1_star, q.q2_star, setting.alpha, setting.beta, setting.a, setting.b};
    ReportRow row = theory_row(setting.label(), bias_t3(dm, params, coeffs), mse);
    row.q1_star = q.q1_star;
    row.q2_star = q.q2_star;
    row.beats_usual = condition_t3_beats_usual(dm, mc);
    row.beats_regression = condition_t3_beats_regression(dm, mc);
    add(EstimatorSpec::t3(params, setting.label()), std::move(row));
  }
  return lineup;
}

Report cmd_theory(const SummaryInput& summary, std::span<const T3Setting> settings) {
  const auto dm = DesignMoments::make(summary.n, to_population_summary(summary));
  Report report;
  report.title = "First-order bias, MSE and PRE";
  report.header_lines = design_lines(dm, summary.n);
  report.rows = build_lineup(dm, settings, false).rows;
  return report;
}

Report cmd_table1() {
  const auto settings = table1_t3_settings();
  Report report = cmd_theory(table1_fixture(), settings);
  report.title = "PRE with respect to the usual estimator (home ownership vs income)";
  report.header_lines.push_back("t3 members use a = 1, b = 0 and optimal q1, q2");
  for (std::size_t i = 0; i < report.rows.size() && i < kTable1Pre.size(); ++i) {
    auto& row = report.rows[i];
    row.reference_pre = kTable1Pre[i];
    if (row.pre)
      row.within_tolerance = std::fabs(*row.pre - kTable1Pre[i]) <= kTable1RelativeTolerance * kTable1Pre[i];
  }
  return report;
}

Report cmd_simulate(const Population& pop, const SimulateOptions& options) {
  const auto summary = summarize_population(pop);
  const auto dm = DesignMoments::make(options.n, summary);
  auto lineup = build_lineup(dm, options.settings, true);
  const auto mc = monte_carlo(pop, options.n, options.reps, lineup.specs, options.seed, options.threads);

  Report report;
  report.title = "Monte Carlo vs first-order theory";
  report.header_lines = design_lines(dm, options.n);
  report.header_lines.push_back(fmt::format("reps = {}, seed = {}", mc.reps, mc.seed));
  for (std::size_t i = 0; i < lineup.rows.size(); ++i) {
    auto& row = lineup.rows[i];
    const auto& st = mc.estimators[i];
    row.emp_mean = st.mean;
    row.emp_bias = st.bias;
    row.emp_mse = st.mse;
    row.emp_mse_se = st.mse_se;
    if (st.pre) row.emp_pre = *st.pre;
  }
  report.rows = std::move(lineup.rows);
  return report;
}

Report cmd_enumerate(const Population& pop, std::size_t n, std::span<const T3Setting> settings,
                     std::uint64_t limit) {
  const auto summary = summarize_population(pop);
  const auto dm = DesignMoments::make(n, summary);
  auto lineup = build_lineup(dm, settings, true);
  const auto exact = enumerate_exact(pop, n, lineup.specs, limit);

  Report report;
  report.title = "Exact enumeration vs first-order theory";
  report.header_lines = design_lines(dm, n);
  report.header_lines.push_back(fmt::format("samples enumerated = {}", exact.sample_count));
  for (std::size_t i = 0; i < lineup.rows.size(); ++i) {
    auto& row = lineup.rows[i];
    const auto& st = exact.estimators[i];
    row.exact_mean = st.expectation;
    row.exact_bias = st.bias;
    row.exact_mse = st.mse;
    if (st.mse > 0.0) row.relative_gap = std::fabs(*row.mse - st.mse) / st.mse;
  }
  report.rows = std::move(lineup.rows);
  return report;
}

GenerateResult cmd_generate(const SyntheticSpec& spec, const std::filesystem::path& out_path) {
  Population pop = generate_population(spec);
  save_population_csv(out_path, pop);
  const auto s = summarize_population(pop);
  Report report;
  report.title = "Generated population " + out_path.string();
  report.header_lines = {
      fmt::format("N = {}, attribute count = {}", s.N, pop.attribute_count()),
      fmt::format("P = {:.17g}", s.P),
      fmt::format("X_bar = {:.17g}", s.x_bar_pop),
      fmt::format("rho_pb = {:.17g}", s.rho_pb),
      fmt::format("C_p = {:.17g}", s.c_p),
      fmt::format("C_x = {:.17g}", s.c_x),
  };
  return GenerateResult{std::move(pop), s, std::move(report)};
}

// ---------------------------------------------------------------------------
// CLI

int exit_code(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::validation: return 2;
    case ErrorCategory::numerical: return 3;
    case ErrorCategory::resource: return 4;
    case ErrorCategory::io: return 1;
  }
  return 1;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ratio-type estimators of a population proportion: theory, simulation, enumeration"};
  app.require_subcommand(1);

  std::string format = "md";
  std::string report_path;
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"md", "csv"}));
  app.add_option("--report", report_path, "Write the report to this file instead of stdout");

  std::vector<std::string> t3_texts;
  auto add_t3 = [&](CLI::App* sub) {
    sub->add_option("--t3", t3_texts, "t3 member as alpha=A,beta=B[,a=A0][,b=B0]; repeatable");
  };

  auto* table1 = app.add_subcommand("table1", "Reproduce the published PRE table from its summary statistics");

  auto* theory = app.add_subcommand("theory", "First-order bias/MSE/PRE from summary statistics");
  std::string summary_path;
  theory->add_option("--summary", summary_path, "Summary JSON file")->required();
  add_t3(theory);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo study on a population CSV");
  std::string population_path;
  SimulateOptions sim;
  simulate->add_option("--population", population_path, "Population CSV (phi,x)")->required();
  simulate->add_option("--n", sim.n, "Sample size")->required();
  simulate->add_option("--reps", sim.reps, "Replicates")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  simulate->add_option("--threads", sim.threads, "Worker threads (0 = all cores)")->capture_default_str();
  add_t3(simulate);

  auto* enumerate = app.add_subcommand("enumerate", "Exact moments over every size-n sample");
  std::size_t enum_n = 0;
  std::uint64_t limit = kDefaultEnumerationLimit;
  enumerate->add_option("--population", population_path, "Population CSV (phi,x)")->required();
  enumerate->add_option("--n", enum_n, "Sample size")->required();
  enumerate->add_option("--limit", limit, "Maximum number of subsets")->capture_default_str();
  add_t3(enumerate);

  auto* generate = app.add_subcommand("generate", "Write a synthetic population CSV");
  SyntheticSpec gen;
  std::string out_path;
  generate->add_option("--N", gen.N, "Population size")->required();
  generate->add_option("--P", gen.target_p, "Target proportion")->required();
  generate->add_option("--rho", gen.target_rho, "Target point-biserial correlation")->required();
  generate->add_option("--seed", gen.seed, "Seed")->capture_default_str();
  generate->add_option("--x-mean", gen.x_mean, "Overall mean of x")->capture_default_str();
  generate->add_option("--x-spread", gen.x_spread, "Within-class sd of x")->capture_default_str();
  generate->add_option("--out", out_path, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    std::vector<T3Setting> settings;
    for (const auto& t : t3_texts) settings.push_back(parse_t3_setting(t));
    if (settings.empty()) settings = table1_t3_settings();

    Report report;
    if (*table1) {
      report = cmd_table1();
    } else if (*theory) {
      report = cmd_theory(load_summary_json(summary_path), settings);
    } else if (*simulate) {
      sim.settings = settings;
      report = cmd_simulate(load_population_csv(population_path), sim);
    } else if (*enumerate) {
      report = cmd_enumerate(load_population_csv(population_path), enum_n, settings, limit);
    } else if (*generate) {
      report = cmd_generate(gen, out_path).report;
    }

    const auto fmt_kind = format == "csv" ? ReportFormat::csv : ReportFormat::markdown;
    if (report_path.empty()) {
      render(out, report, fmt_kind);
    } else {
      std::ofstream file(report_path);
      if (!file) throw IoError("cannot write " + report_path);
      render(file, report, fmt_kind);
      if (!file.flush()) throw IoError("write failed for " + report_path);
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace propest
