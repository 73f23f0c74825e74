#include "propest/moments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "propest/errors.hpp"

namespace propest {

double var_usual(const DesignMoments& dm) {
  const double P = dm.P(), cp = dm.summary.c_p;
  return dm.f * (P * P * (cp * cp));
}

double bias_t1(const DesignMoments& dm) {
  const double cx = dm.summary.c_x;
  return dm.f * dm.P() * (cx * cx - dm.cross());
}

double mse_t1(const DesignMoments& dm) {
  const double P = dm.P(), cp = dm.summary.c_p, cx = dm.summary.c_x;
  return dm.f * P * P * (cp * cp + cx * cx - 2.0 * dm.cross());
}

double bias_t2(const DesignMoments& dm, const T2Instance& inst) {
  const double P = dm.P(), cp = dm.summary.c_p, cx = dm.summary.c_x;
  return dm.f * (2.0 * inst.h3() * P * dm.cross() + cx * cx * inst.h2() + P * P * cp * cp * inst.h4());
}

double mse_t2(const DesignMoments& dm, double h1) {
  const double P = dm.P(), cp = dm.summary.c_p, cx = dm.summary.c_x;
  return dm.f * (P * P * (cp * cp) + h1 * h1 * cx * cx + 2.0 * h1 * P * dm.cross());
}

double opt_h1(const DesignMoments& dm) {
  if (dm.summary.c_x == 0.0) throw DegenerateAuxiliary("C_x is zero");
  return -dm.summary.rho_pb * dm.P() * dm.summary.c_p / dm.summary.c_x;
}

double min_mse_t2(const DesignMoments& dm) {
  const double rho = dm.summary.rho_pb;
  return var_usual(dm) * (1.0 - rho * rho);
}

T3Coefficients t3_coefficients(double alpha, double beta, double a, double b, double x_bar_pop) {
  const double denom = a * x_bar_pop + b;
  if (!(denom > 0.0)) throw DomainError("a*X_bar + b must be positive, got " + std::to_string(denom));
  T3Coefficients c;
  c.theta = a * x_bar_pop / denom;
  c.b_coef = (alpha + beta / 2.0) * c.theta;
  c.a_coef = c.theta * c.theta / 8.0 *
             (4.0 * alpha * (alpha + 1.0) + beta * (beta + 2.0) + 4.0 * alpha * beta);
  return c;
}

MseComponents m_components(const DesignMoments& dm, const T3Coefficients& coeffs) {
  const double P = dm.P(), X = dm.summary.x_bar_pop, f = dm.f;
  const double cp2 = dm.summary.c_p * dm.summary.c_p;
  const double cx2 = dm.summary.c_x * dm.summary.c_x;
  const double cross = dm.cross();
  const double B = coeffs.b_coef, A = coeffs.a_coef;

  MseComponents mc;
  mc.m1 = f * (P * P * cp2 + P * P * (B * B * cx2 - 2.0 * B * cross));
  mc.m2 = X * X * f * cx2;
  mc.m3 = P * P * f * (A * cx2 - B * cross);
  mc.m4 = P * X * f * (-B * cx2 + cross);
  mc.m5 = X * P * f * (-B * cx2);

  mc.d1 = P * P + mc.m1 + 2.0 * mc.m3;
  mc.d2 = -mc.m4 - mc.m5;
  mc.d3 = mc.m2;
  mc.d4 = P * P + mc.m3;
  mc.d5 = -mc.m5;
  return mc;
}

// Extended precision: the minimum is often orders of magnitude below P^2.
using wide = long double;

double mse_t3_at(double q1, double q2, double P, const MseComponents& mc) {
  const wide a = q1, c = q2, p = P;
  const wide value = (a - 1) * (a - 1) * p * p + a * a * (wide(mc.m1) + 2 * wide(mc.m3)) + c * c * wide(mc.m2) +
                     2 * a * c * (-wide(mc.m4) - wide(mc.m5)) - 2 * a * wide(mc.m3) + 2 * c * wide(mc.m5);
  return static_cast<double>(value);
}

namespace {

wide checked_determinant(const MseComponents& mc) {
  const wide det = wide(mc.d1) * mc.d3 - wide(mc.d2) * mc.d2;
  const wide scale = std::max(std::fabs(wide(mc.d1) * mc.d3), wide(mc.d2) * mc.d2);
  if (!(det > 1e-9L * scale) || scale == 0)
    throw SingularSystem("d1*d3 - d2^2 = " + std::to_string(static_cast<double>(det)) + " is not positive");
  return det;
}

}  // namespace

OptimalQ opt_q(const MseComponents& mc) {
  const wide det = checked_determinant(mc);
  const wide d1 = mc.d1, d2 = mc.d2, d3 = mc.d3, d4 = mc.d4, d5 = mc.d5;
  return OptimalQ{static_cast<double>((d3 * d4 - d2 * d5) / det), static_cast<double>((d1 * d5 - d2 * d4) / det)};
}

double min_mse_t3(double P, const MseComponents& mc) {
  checked_determinant(mc);
  // Rebuild d from m so P^2 is not rounded into d1 and d4 before it cancels.
  const wide p2 = wide(P) * P, m3 = mc.m3, m4 = mc.m4, m5 = mc.m5;
  const wide d1 = p2 + mc.m1 + 2 * m3, d2 = -m4 - m5, d3 = mc.m2, d4 = p2 + m3, d5 = -m5;
  const wide det = d1 * d3 - d2 * d2;
  return static_cast<double>(p2 - (d1 * d5 * d5 + d3 * d4 * d4 - 2 * d2 * d4 * d5) / det);
}

double bias_t3(const DesignMoments& dm, const T3Params& params, const T3Coefficients& coeffs) {
  const double P = dm.P(), X = dm.summary.x_bar_pop;
  const double cx2 = dm.summary.c_x * dm.summary.c_x;
  return P * (params.q1 - 1.0) +
         dm.f * ((params.q2 * X * coeffs.b_coef + params.q1 * P * coeffs.a_coef) * cx2 -
                 params.q1 * P * coeffs.b_coef * dm.cross());
}

double pre(double mse_ref, double mse) {
  if (mse == 0.0) throw DivisionByZero("PRE undefined for zero MSE");
  return 100.0 * mse_ref / mse;
}

bool condition_t3_beats_usual(const DesignMoments& dm, const MseComponents& mc) {
  if (dm.f == 0.0) return true;
  return min_mse_t3(dm.P(), mc) <= var_usual(dm);
}

bool condition_t3_beats_regression(const DesignMoments& dm, const MseComponents& mc) {
  if (dm.f == 0.0) return true;
  return min_mse_t3(dm.P(), mc) <= min_mse_t2(dm);
}

T3Params optimal_t3_params(const DesignMoments& dm, double alpha, double beta, double a, double b) {
  const auto coeffs = t3_coefficients(alpha, beta, a, b, dm.summary.x_bar_pop);
  const auto q = opt_q(m_components(dm, coeffs));
  T3Params params{q.q1_star, q.q2_star, alpha, beta, a, b};
  validate(params);
  return params;
}

}  // namespace propest
