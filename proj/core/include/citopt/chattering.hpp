#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "citopt/types.hpp"

namespace citopt {

struct ConstantsOptions {
  double tol = 1e-12;
  std::array<double, 3> seed{0.17, 0.47, 0.87};  // (alpha, beta1, beta2)
  bool force_grid_fallback = false;
};

// Residuals of the five defining equations, in the order
// x1-match, x2-match, x3-match, tau-coefficient, constant-coefficient.
std::array<double, 5> constants_residuals(const ChatteringConstants& c);

// beta3 from the constant-coefficient equation, which is linear in beta3.
double beta3_from(double alpha, double beta1, double beta2);

ChatteringConstants solve_constants(const ConstantsOptions& opt);
ChatteringConstants solve_constants(double tol = 1e-12);

// tau_i = (1 - alpha^i) / (1 - alpha) * tau1, with tau_0 = 0.
double junction_time(const ChatteringConstants& c, int i);

// Levels (-1, +1, -1) on (tau_{i-1}, tau_i), switching at fractions beta1, beta2.
PiecewiseControl build_cycle_control(const ChatteringConstants& c, int i);

// Number of cycles actually emitted: n_cycles, or fewer once a cycle is
// shorter than min_fraction * tau1.
int chattering_cycle_count(const ChatteringConstants& c, int n_cycles, double min_fraction = 1e-15);

PiecewiseControl build_chattering_schedule(const ChatteringConstants& c, int n_cycles = 40,
                                           double min_fraction = 1e-15);

CostateArc costates(const ChatteringConstants& c, double p0, int i);

struct AlphaFamilyPoint {
  double alpha = 0.0;
  double tau1 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double j1 = 0.0;
  double j = 0.0;
};

AlphaFamilyPoint family_point(double alpha, double tol = 1e-12);
PiecewiseControl family_cycle(const AlphaFamilyPoint& p);
std::vector<AlphaFamilyPoint> alpha_sweep(double from, double to, double step, double tol = 1e-12);
void write_sweep_csv(std::ostream& os, const std::vector<AlphaFamilyPoint>& pts);

// max |y_k(tau; a e1) - a^k y_k(tau / a; e1)| over the grid.
double homogeneity_check(const ChatteringConstants& c, double a, const std::vector<double>& grid,
                         int n_cycles = 40);

struct OneSwitchReport {
  // Residuals of the single-arc attempt that ends exactly at the origin.
  double direct_min_residual = 0.0;
  std::array<double, 3> direct_argmin{};  // (T, sigma, v0)
  // One switch per cycle with junction ratio alpha in [0, 1 - exclusion].
  double cycle_min_residual = 0.0;
  std::array<double, 4> cycle_argmin{};  // (T, sigma, v0, alpha)
  double exclusion = 0.0;
  // Residual at the excluded periodic point T = 4, sigma = 1/2, v0 = -1, alpha = 1.
  double cycle_degenerate_residual = 0.0;
};

OneSwitchReport check_infeasible_one_switch(double exclusion = 1e-2);

}  // namespace citopt
