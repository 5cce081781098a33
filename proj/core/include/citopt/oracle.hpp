#pragma once

// Brute-force references. Nothing here calls into the solvers it is meant to
// check; the shared pieces are the plain data types only.

#include <string>
#include <utility>
#include <vector>

#include "citopt/types.hpp"

namespace citopt::oracle {

struct FamilyValue {
  double alpha = 0.0;
  double tau1 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double j = 0.0;
  bool ok = false;
};

// One-cycle family member from e1 to alpha e1 with levels (-1, +1, -1), solved
// by 2-D Newton on the end-state equations; cost by per-segment Simpson.
FamilyValue family_value(double alpha);

struct GridOptimum {
  double alpha = 0.0;
  double j = 0.0;
  std::vector<FamilyValue> grid;
};

GridOptimum alpha_grid_optimum(const std::vector<double>& grid, double tol = 1e-12);

// Fixed-step classical RK4 on the integrator chain.
StateVector rk4_reference(const StateVector& x0, const PiecewiseControl& pc, double dt);

enum class System {
  Constants,       // (alpha, beta1, beta2) of the chattering cycle
  SingleArc,       // one switch, ending at the origin directly
  OneSwitchCycle,  // one switch per cycle with junction ratio alpha < 1
  AlphaFamily,     // (tau1, beta1) of the one-cycle family at fixed alpha
  SurfacePair,     // (t1, t2) where gamma-plus meets y3 = 0
};

const char* to_string(System s);

struct LandscapeOptions {
  int resolution = 60;            // grid points per continuous axis
  std::vector<std::pair<double, double>> box;  // empty: system default
  ChatteringConstants constants;  // needed by AlphaFamily (alpha) and SurfacePair (betas, tau1)
  double exclusion = 1e-2;        // OneSwitchCycle: alpha <= 1 - exclusion
};

struct Landscape {
  System system = System::Constants;
  double min_residual = 0.0;
  std::vector<double> argmin;
  int basins = 0;  // distinct refined roots with residual below root_tol
  std::vector<std::vector<double>> roots;
};

Landscape residual_landscape(System s, const LandscapeOptions& opt);

}  // namespace citopt::oracle
