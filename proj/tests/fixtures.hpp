#pragma once

// Shared fixtures and hand-rolled generators for the unit and acceptance tests.

#include <cmath>
#include <random>
#include <vector>

#include "propest/moments.hpp"
#include "propest/population.hpp"

namespace propest::testing {

/// Home ownership vs income: n=11, N=40 and the published statistics.
inline DesignMoments reference_design() {
  PopulationSummary s;
  s.N = 40;
  s.P = 0.525;
  s.x_bar_pop = 14.4;
  s.rho_pb = 0.897;
  s.c_p = 0.963;
  s.c_x = 0.3085;
  const double sp = s.c_p * s.P, sx = s.c_x * s.x_bar_pop;
  s.s_p_sq = sp * sp;
  s.s_x_sq = sx * sx;
  s.s_phix = s.rho_pb * sp * sx;
  return DesignMoments{1.0 / 11.0 - 1.0 / 40.0, s};
}

/// phi = (1,0,1,0), x = (2,1,2,1).
inline Population four_unit_population() {
  return Population({{1, 2.0}, {0, 1.0}, {1, 2.0}, {0, 1.0}});
}

/// Nondegenerate population whose x depends on phi plus noise.
inline Population random_population(std::mt19937_64& gen, std::size_t N, double shift = 5.0) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double p = 0.2 + 0.6 * unit(gen);
  const double slope = 4.0 * unit(gen) - 1.0;
  for (;;) {
    std::vector<PopulationUnit> units(N);
    for (auto& u : units) {
      u.phi = unit(gen) < p ? 1 : 0;
      u.x = shift + slope * u.phi + noise(gen);
    }
    Population pop(std::move(units));
    if (pop.nondegenerate()) return pop;
  }
}

struct RandomT3Case {
  DesignMoments dm;
  double alpha, beta, a, b;
};

/// Nondegenerate design with f <= 0.1 and a random t3 member.
inline RandomT3Case random_t3_case(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const std::size_t N = 30 + gen() % 1971;
  const std::size_t n = 10 + gen() % (N / 2 - 9);
  PopulationSummary s;
  s.N = N;
  s.P = 0.05 + 0.9 * u01(gen);
  s.x_bar_pop = 0.5 + 99.5 * u01(gen);
  s.rho_pb = -0.99 + 1.98 * u01(gen);
  const double Nd = static_cast<double>(N);
  s.c_p = std::sqrt(Nd * (1 - s.P) / ((Nd - 1) * s.P));
  s.c_x = 0.05 + 0.95 * u01(gen);
  const double sp = s.c_p * s.P, sx = s.c_x * s.x_bar_pop;
  s.s_p_sq = sp * sp;
  s.s_x_sq = sx * sx;
  s.s_phix = s.rho_pb * sp * sx;
  return RandomT3Case{DesignMoments{fpc(n, N), s}, -1.0 + 3.0 * u01(gen), -1.0 + 3.0 * u01(gen),
                      0.1 + 4.9 * u01(gen), 10.0 * u01(gen)};
}

inline double rel_err(double actual, double expected) {
  const double scale = std::fabs(expected);
  return scale == 0.0 ? std::fabs(actual) : std::fabs(actual - expected) / scale;
}

}  // namespace propest::testing
