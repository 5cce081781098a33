#pragma once

#include <iosfwd>
#include <vector>

#include "citopt/dynamics.hpp"
#include "citopt/types.hpp"

namespace citopt {

// Fourth-order problem that starts tangent to the velocity bound:
// x(0) = (x01, 0, M3, x04) with x01 < 0, terminal x = (0, 0, M3, xf4).
struct TransferSpec {
  double m0 = 1.0;
  double m3 = 1.0;
  double x01 = -1.0;
  double x04 = 0.0;
  double xf4 = 10.0;
};

void validate_transfer(const TransferSpec& s);

// Smallest xf4 - x04 the construction can reach.
double min_displacement(const TransferSpec& s, const ChatteringConstants& c);

struct TransferSolution {
  PiecewiseControl control;  // chattering followed by the cruise arc
  Trajectory trajectory;
  double t_inf = 0.0;
  double t_f = 0.0;
  double x_inf4 = 0.0;
  int cycles = 0;
  std::vector<double> junction_times;      // t_1, t_2, ...
  std::vector<StateVector> junction_states;  // propagated state at each t_i
};

TransferSolution solve_transfer(const TransferSpec& s, const ChatteringConstants& c, int n_cycles = 40,
                                double dt = 1e-2);

// Worst violation of |u| <= M0 and the one-sided x3 <= M3; <= 0 when feasible.
double transfer_audit(const TransferSpec& s, const Trajectory& x);

struct MimSolution {
  PiecewiseControl control;
  Trajectory trajectory;
  double t_inf = 0.0;
  double t_f = 0.0;
  double j = 0.0;  // scaled cost of the alpha = 0 member
};

MimSolution solve_transfer_mim(const TransferSpec& s, double dt = 1e-2);

// The scaled trajectory must carry y4 = running integral of y3 as its fourth
// component (an order-4 chain started at (y1, y2, y3, 0)).
Trajectory map_scaled_to_physical(const TransferSpec& s, const Trajectory& y);
Trajectory map_physical_to_scaled(const TransferSpec& s, const Trajectory& x);
PiecewiseControl map_control_to_physical(const TransferSpec& s, const PiecewiseControl& v);

// Rest-to-rest transfer of a fourth-order chain from x4 = x04 to x4 = xf4.
struct RestToRestSpec {
  Bounds bounds;
  double x04 = 0.0;
  double xf4 = 0.0;

  // x04 = -M4, xf4 = +M4; M4 must be finite.
  static RestToRestSpec symmetric(const Bounds& b);
};

// Time-optimal rest -> (x01, 0, M3) transfer under |u| <= M0, |x1| <= M1, |x2| <= M2.
PiecewiseControl tangency_transfer(const Bounds& b, double x01);

struct RestToRestResult {
  PiecewiseControl control;
  Trajectory trajectory;
  AuditReport audit;
  double x01_opt = 0.0;
  double t_f_opt = 0.0;
  double t_f_mim = 0.0;
  double t_inf = 0.0;   // start of the cruise arc
  double loss_opt = 0.0;  // one-sided time loss relative to cruising
  double loss_mim = 0.0;
};

// Time loss of one acceleration phase that enters the cruise through chattering
// from (x01, 0, M3): phase time - phase displacement / M3 + x01^4 J / (M0^3 M3).
double entry_loss(const Bounds& b, const ChatteringConstants& c, double x01);

RestToRestResult plan_rest_to_rest(const RestToRestSpec& s, const ChatteringConstants& c,
                                   double tol = 1e-10, double dt = 1e-3);

enum class GapAxes { M0M1, M1M2 };

struct GapSurface {
  GapAxes axes = GapAxes::M0M1;
  std::vector<double> p;  // first axis values
  std::vector<double> q;  // second axis values
  std::vector<std::vector<double>> gap;  // gap[i][j] at (p[i], q[j]); NaN when infeasible
};

GapSurface gap_surface(const RestToRestSpec& base, const ChatteringConstants& c, GapAxes axes,
                       const std::vector<double>& p, const std::vector<double>& q);
void write_gap_csv(std::ostream& os, const GapSurface& g);

}  // namespace citopt
