#pragma once

#include <iosfwd>
#include <vector>

#include "citopt/types.hpp"

namespace citopt {

// Exact state after holding u for T. x[k-1] picks up sum_j x[k-1-j] T^j/j! + u T^k/k!.
StateVector propagate_segment(const StateVector& x, double T, double u);

StateVector propagate(const StateVector& x0, const PiecewiseControl& pc);

// States at every segment boundary, including the start and end.
std::vector<StateVector> boundary_states(const StateVector& x0, const PiecewiseControl& pc);

// State at absolute time t in [pc.t0, pc.t_end()].
StateVector state_at(const StateVector& x0, const PiecewiseControl& pc, double t);

// x_k(s) on one constant-control segment, as polynomial coefficients in s.
std::vector<double> segment_polynomial(const StateVector& x, double u, int k);

Trajectory sample(const StateVector& x0, const PiecewiseControl& pc, double dt);

// Exact integral of x_k over the whole schedule.
double integral_cost(const StateVector& x0, const PiecewiseControl& pc, int k);

struct ComponentExtent {
  double min = 0.0;
  double max = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
};

// Range of each component, including extrema strictly between samples.
std::vector<ComponentExtent> extents(const Trajectory& traj);

struct AuditReport {
  // Index 0 is the control, index k the state x_k. Value is max(|.|) - M,
  // -inf for unbounded entries.
  std::vector<double> max_violation;
  std::vector<double> argmax_time;

  double worst() const;
};

AuditReport audit(const Trajectory& traj, const Bounds& b);

void write_csv(std::ostream& os, const Trajectory& traj);

}  // namespace citopt
