#include "propest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "propest/errors.hpp"

namespace propest {

namespace {

constexpr double kFirstStep = 1e-5;
constexpr double kSecondStep = 1e-4;
constexpr double kDifferenceTolerance = 1e-6;

double u_ratio(const SampleSummary& s, double x_bar_pop) {
  if (x_bar_pop == 0.0) throw DivisionByZero("population mean of x is zero");
  return s.x_bar / x_bar_pop;
}

void check_coefficient(const char* name, double analytic, double numeric) {
  if (std::fabs(analytic - numeric) > kDifferenceTolerance * std::max(1.0, std::fabs(analytic)))
    throw std::logic_error(std::string("t2 coefficient ") + name + " = " + std::to_string(analytic) +
                           " disagrees with finite difference " + std::to_string(numeric));
}

}  // namespace

std::string_view to_string(T2Family family) {
  switch (family) {
    case T2Family::linear_difference: return "linear-difference";
    case T2Family::power_ratio: return "power-ratio";
    case T2Family::exponential: return "exponential";
  }
  return "unknown";
}

T2Instance::T2Instance(T2Family family, double param, double P) : family_(family), param_(param) {
  if (!std::isfinite(param) || !std::isfinite(P))
    throw ValidationError("t2 parameter and P must be finite");
  switch (family) {
    case T2Family::linear_difference:
      h1_ = param;
      break;
    case T2Family::power_ratio:
      h1_ = param * P;
      h2_ = 0.5 * param * (param - 1.0) * P;
      h3_ = 0.5 * param;
      break;
    case T2Family::exponential:
      // w(u) = delta (1-u)/(1+u): w(1) = 0, w'(1) = -delta/2, w''(1) = delta/2.
      h1_ = -0.5 * param * P;
      h2_ = 0.5 * P * (0.25 * param * param + 0.5 * param);
      h3_ = -0.25 * param;
      break;
  }

  const auto H = [this](double p, double u) { return evaluate(p, u); };
  const double e1 = kFirstStep, e2 = kSecondStep;
  check_coefficient("h1", h1_, (H(P, 1 + e1) - H(P, 1 - e1)) / (2 * e1));
  check_coefficient("h2", h2_, 0.5 * (H(P, 1 + e2) - 2 * H(P, 1) + H(P, 1 - e2)) / (e2 * e2));
  check_coefficient("h3", h3_,
                    0.5 * (H(P + e2, 1 + e2) - H(P + e2, 1 - e2) - H(P - e2, 1 + e2) + H(P - e2, 1 - e2)) /
                        (4 * e2 * e2));
  check_coefficient("h4", h4_, 0.5 * (H(P + e2, 1) - 2 * H(P, 1) + H(P - e2, 1)) / (e2 * e2));
}

double T2Instance::evaluate(double p, double u) const {
  switch (family_) {
    case T2Family::linear_difference:
      return p + param_ * (u - 1.0);
    case T2Family::power_ratio:
      if (!(u > 0.0)) throw DomainError("power-ratio t2 needs u > 0, got " + std::to_string(u));
      return p * std::pow(u, param_);
    case T2Family::exponential:
      if (!(u > 0.0)) throw DomainError("exponential t2 needs u > 0, got " + std::to_string(u));
      return p * std::exp(param_ * (1.0 - u) / (1.0 + u));
  }
  return p;
}

void validate(const T3Params& params) {
  if (!(params.a > 0.0)) throw ValidationError("t3 scalar a must be positive");
  if (!(params.b >= 0.0)) throw ValidationError("t3 scalar b must be nonnegative");
  for (double v : {params.q1, params.q2, params.alpha, params.beta, params.a, params.b})
    if (!std::isfinite(v)) throw ValidationError("t3 parameters must be finite");
}

double clamp_unit(double estimate) { return std::clamp(estimate, 0.0, 1.0); }

double est_usual(const SampleSummary& s) { return s.p; }

double est_t1(const SampleSummary& s, double x_bar_pop) {
  if (s.x_bar == 0.0) throw DivisionByZero("sample mean of x is zero");
  return s.p * (x_bar_pop / s.x_bar);
}

double est_t2(const T2Instance& inst, const SampleSummary& s, double x_bar_pop) {
  return inst.evaluate(s.p, u_ratio(s, x_bar_pop));
}

double est_t3(const T3Params& params, const SampleSummary& s, double x_bar_pop) {
  const double pop_term = params.a * x_bar_pop + params.b;
  const double sample_term = params.a * s.x_bar + params.b;
  if (!(sample_term > 0.0))
    throw DomainError("a*x_bar + b must be positive, got " + std::to_string(sample_term));
  if (!(pop_term > 0.0))
    throw DomainError("a*X_bar + b must be positive, got " + std::to_string(pop_term));

  const double linear = params.q1 * s.p + params.q2 * (x_bar_pop - s.x_bar);
  const double ratio = params.alpha == 0.0 ? 1.0 : std::pow(pop_term / sample_term, params.alpha);
  const double expo =
      params.beta == 0.0 ? 1.0 : std::exp(params.beta * (pop_term - sample_term) / (pop_term + sample_term));
  return linear * ratio * expo;
}

double est_regression(const SampleSummary& s, double x_bar_pop, double b_coef) {
  return s.p + b_coef * (x_bar_pop - s.x_bar);
}

double optimal_regression_coef(const PopulationSummary& pop) {
  if (!(pop.s_x_sq > 0.0)) throw DegenerateAuxiliary("auxiliary variance is zero");
  return pop.s_phix / pop.s_x_sq;
}

}  // namespace propest
