#include "propest/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "propest/errors.hpp"

namespace propest {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view field, std::size_t line) {
  double value = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end || field.empty())
    throw ParseError("x value '" + std::string(field) + "' is not a number", line);
  if (!std::isfinite(value)) throw ParseError("x value is not finite", line);
  return value;
}

}  // namespace

void validate(const SummaryInput& in) {
  if (in.N < 2) throw ValidationError("N must be at least 2");
  if (in.n < 1 || in.n > in.N) throw ValidationError("n must satisfy 1 <= n <= N");
  if (!(in.P > 0.0 && in.P < 1.0)) throw ValidationError("P must lie in (0, 1)");
  if (!(in.c_p > 0.0) || !std::isfinite(in.c_p)) throw ValidationError("c_p must be positive");
  if (!(in.c_x > 0.0) || !std::isfinite(in.c_x)) throw ValidationError("c_x must be positive");
  if (!(std::fabs(in.rho) <= 1.0)) throw ValidationError("rho must satisfy |rho| <= 1");
  if (in.x_bar == 0.0 || !std::isfinite(in.x_bar)) throw ValidationError("x_bar must be finite and nonzero");
}

PopulationSummary to_population_summary(const SummaryInput& in) {
  validate(in);
  PopulationSummary s;
  s.N = in.N;
  s.P = in.P;
  s.x_bar_pop = in.x_bar;
  const double s_p = in.c_p * in.P;
  const double s_x = in.c_x * std::fabs(in.x_bar);
  s.s_p_sq = s_p * s_p;
  s.s_x_sq = s_x * s_x;
  s.s_phix = in.rho * s_p * s_x;
  s.rho_pb = in.rho;
  s.c_p = in.c_p;
  s.c_x = in.c_x;
  return s;
}

Population read_population_csv(std::istream& in) {
  std::string raw;
  std::size_t line = 0;
  bool have_header = false;
  std::vector<PopulationUnit> units;
  while (std::getline(in, raw)) {
    ++line;
    const auto text = trim(raw);
    if (text.empty()) continue;
    if (!have_header) {
      if (text != "phi,x") throw ParseError("expected header 'phi,x', got '" + std::string(text) + "'", line);
      have_header = true;
      continue;
    }
    const auto comma = text.find(',');
    if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos)
      throw ParseError("expected two fields 'phi,x'", line);
    const auto phi = trim(text.substr(0, comma));
    if (phi != "0" && phi != "1") throw ParseError("phi must be 0 or 1, got '" + std::string(phi) + "'", line);
    units.push_back(PopulationUnit{phi == "1" ? 1 : 0, parse_double(trim(text.substr(comma + 1)), line)});
  }
  if (!have_header) throw ParseError("missing header 'phi,x'", 0);
  Population pop(std::move(units));
  if (!pop.nondegenerate())
    throw DegeneratePopulation("population needs both attribute classes and a non-constant x");
  return pop;
}

Population load_population_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_population_csv(in);
}

void write_population_csv(std::ostream& out, const Population& pop) {
  out << "phi,x\n";
  for (const auto& u : pop.units()) out << fmt::format("{},{:.17g}\n", u.phi, u.x);
}

void save_population_csv(const std::filesystem::path& path, const Population& pop) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_population_csv(out, pop);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

SummaryInput parse_summary_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), 0);
  }
  if (!doc.is_object()) throw ParseError("summary must be a JSON object", 0);

  static constexpr const char* kKeys[] = {"n", "N", "P", "x_bar", "rho", "c_p", "c_x"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys))
      throw ValidationError("unknown field '" + key + "'");
  }
  for (const char* key : kKeys)
    if (!doc.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");

  auto size_field = [&](const char* key) -> std::size_t {
    const auto& v = doc.at(key);
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    if (v.is_number_integer()) throw ValidationError(std::string("field '") + key + "' must be nonnegative");
    throw ValidationError(std::string("field '") + key + "' must be an integer");
  };
  auto real_field = [&](const char* key) {
    const auto& v = doc.at(key);
    if (!v.is_number()) throw ValidationError(std::string("field '") + key + "' must be a number");
    return v.get<double>();
  };

  SummaryInput in;
  in.n = size_field("n");
  in.N = size_field("N");
  in.P = real_field("P");
  in.x_bar = real_field("x_bar");
  in.rho = real_field("rho");
  in.c_p = real_field("c_p");
  in.c_x = real_field("c_x");
  validate(in);
  return in;
}

SummaryInput load_summary_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_summary_json(buffer.str());
}

}  // namespace propest
