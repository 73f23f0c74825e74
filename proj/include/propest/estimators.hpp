#pragma once

#include <string_view>

#include "propest/population.hpp"

namespace propest {

/// Shapes of H(p, u) with H(p, 1) = p, where u = x_bar / X_bar.
enum class T2Family {
  linear_difference,  // p + d (u - 1)
  power_ratio,        // p u^g
  exponential,        // p exp(delta (1 - u) / (1 + u))
};

std::string_view to_string(T2Family family);

/// A member of the general t2 family together with its second-order Taylor
/// coefficients about (p = P, u = 1):
///   h1 = dH/du, h2 = 1/2 d2H/du2, h3 = 1/2 d2H/dpdu, h4 = 1/2 d2H/dp2.
class T2Instance {
 public:
  /// Coefficients are computed analytically and checked against central
  /// finite differences; a mismatch throws std::logic_error.
  T2Instance(T2Family family, double param, double P);

  T2Family family() const noexcept { return family_; }
  double param() const noexcept { return param_; }
  double h1() const noexcept { return h1_; }
  double h2() const noexcept { return h2_; }
  double h3() const noexcept { return h3_; }
  double h4() const noexcept { return h4_; }

  /// H(p, u). Throws DomainError when u <= 0 for the power and exponential shapes.
  double evaluate(double p, double u) const;

 private:
  T2Family family_;
  double param_;
  double h1_ = 0.0, h2_ = 0.0, h3_ = 0.0, h4_ = 0.0;
};

/// Constants of the t3 family
///   [q1 p + q2 (X - x)] [(aX + b)/(ax + b)]^alpha exp{beta [(aX+b) - (ax+b)] / [(aX+b) + (ax+b)]}.
struct T3Params {
  double q1 = 1.0;
  double q2 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double a = 1.0;
  double b = 0.0;
};

/// Throws ValidationError unless a > 0 and b >= 0.
void validate(const T3Params& params);

double clamp_unit(double estimate);

double est_usual(const SampleSummary& s);

/// p X_bar / x_bar.
double est_t1(const SampleSummary& s, double x_bar_pop);

double est_t2(const T2Instance& inst, const SampleSummary& s, double x_bar_pop);

/// Uses the sample proportion p in the linear bracket.
double est_t3(const T3Params& params, const SampleSummary& s, double x_bar_pop);

/// p + b (X_bar - x_bar).
double est_regression(const SampleSummary& s, double x_bar_pop, double b_coef);

/// rho S_phi / S_x, the variance-minimizing regression slope.
double optimal_regression_coef(const PopulationSummary& pop);

}  // namespace propest
