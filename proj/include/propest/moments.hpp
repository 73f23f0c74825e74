#pragma once

// First-order (O(1/n)) bias and MSE expressions for the proportion
// estimators, their optimal constants, and efficiency comparisons.

#include <cstddef>

#include "propest/estimators.hpp"
#include "propest/population.hpp"

namespace propest {

struct DesignMoments {
  double f = 0.0;
  PopulationSummary summary;

  static DesignMoments make(std::size_t n, const PopulationSummary& summary) {
    return DesignMoments{fpc(n, summary.N), summary};
  }

  double P() const noexcept { return summary.P; }
  /// rho_pb C_p C_x
  double cross() const noexcept { return summary.rho_pb * summary.c_p * summary.c_x; }
};

struct T3Coefficients {
  double theta = 1.0;
  double b_coef = 0.0;  // (alpha + beta/2) theta
  double a_coef = 0.0;  // theta^2/8 [4 alpha (alpha+1) + beta (beta+2) + 4 alpha beta]
};

/// Constants of the quadratic MSE(t3)(q1, q2)
///   = P^2 + q1^2 d1 + q2^2 d3 + 2 q1 q2 d2 - 2 q1 d4 - 2 q2 d5.
struct MseComponents {
  double m1 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0, m5 = 0.0;
  double d1 = 0.0, d2 = 0.0, d3 = 0.0, d4 = 0.0, d5 = 0.0;

  double determinant() const noexcept { return d1 * d3 - d2 * d2; }
};

struct OptimalQ {
  double q1_star = 0.0;
  double q2_star = 0.0;
};

double var_usual(const DesignMoments& dm);

double bias_t1(const DesignMoments& dm);
double mse_t1(const DesignMoments& dm);

/// Bias of a t2 member from its Taylor coefficients. The cross term carries
/// 2*h3 because h3 is half the mixed partial.
double bias_t2(const DesignMoments& dm, const T2Instance& inst);
double mse_t2(const DesignMoments& dm, double h1);
double opt_h1(const DesignMoments& dm);
/// Also the first-order MSE of the regression estimator at its optimal slope.
double min_mse_t2(const DesignMoments& dm);

T3Coefficients t3_coefficients(double alpha, double beta, double a, double b, double x_bar_pop);

MseComponents m_components(const DesignMoments& dm, const T3Coefficients& coeffs);

double mse_t3_at(double q1, double q2, double P, const MseComponents& mc);

/// Solves the 2x2 normal equations. Throws SingularSystem when
/// d1 d3 - d2^2 <= 1e-9 max(d1 d3, d2^2).
OptimalQ opt_q(const MseComponents& mc);

double min_mse_t3(double P, const MseComponents& mc);

double bias_t3(const DesignMoments& dm, const T3Params& params, const T3Coefficients& coeffs);

/// 100 mse_ref / mse. Throws DivisionByZero when mse == 0.
double pre(double mse_ref, double mse);

/// min MSE(t3) <= V(p). Holds trivially for a census (f = 0).
bool condition_t3_beats_usual(const DesignMoments& dm, const MseComponents& mc);

/// min MSE(t3) <= f P^2 C_p^2 (1 - rho^2).
bool condition_t3_beats_regression(const DesignMoments& dm, const MseComponents& mc);

/// Fills q1, q2 of a t3 member with the optimal constants for the design.
T3Params optimal_t3_params(const DesignMoments& dm, double alpha, double beta, double a = 1.0,
                           double b = 0.0);

}  // namespace propest
