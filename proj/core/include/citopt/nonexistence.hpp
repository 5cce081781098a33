#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace citopt {

// Quadratic in xi whose root links three consecutive quarter-interval lengths.
double fc(double xi, double xi1, double xi2);

// Unique positive root of fc(.; tau_i, tau_ip1); requires 0 < tau_ip1 < tau_i.
double next_tau(double tau_i, double tau_ip1);

// r_{i+1} from r_i via r^2 - a r + 1 = 0 with a = 3 + 1/(r (1 - r)).
double next_r(double r);

struct RecursionState {
  std::vector<double> taus;  // tau_1, tau_2, ...
  std::vector<double> rs;    // r_i = 1 - tau_{i+1} / tau_i
};

struct RecursionReport {
  RecursionState state;
  std::vector<double> partial_sums;  // S_N = tau_1 + ... + tau_N
  double i_r_tail = 0.0;             // n * r_n
  double raabe_tail = 0.0;           // n * (tau_n / tau_{n+1} - 1)
  bool strictly_decreasing = true;
};

// The tau form is used for the first `tau_steps` steps, the r form after that.
RecursionReport run_recursion(double tau1, double tau2, int n_steps, int tau_steps = 100);

void write_recursion_csv(std::ostream& os, const RecursionReport& r, int stride = 1);

// Sums over a quadruple (tau_i, ..., tau_{i+3}) that fix the state after four arcs.
std::array<double, 3> junction_sums(const std::array<double, 4>& tau);

struct JacobianCheck {
  double det = 0.0;
  double factored = 0.0;  // 6 (tau_{i+1} + tau_{i+2}) fc(tau_{i+2}; tau_i, tau_{i+1})
  double scale = 0.0;     // sum of |terms| in the determinant expansion
};

// Determinant of d(F1, F2, F3) / d(tau_i, tau_{i+1}, tau_{i+2}).
JacobianCheck jacobian_check(const std::array<double, 4>& tau);

struct JacobianSweep {
  int samples = 0;
  double max_relative_det = 0.0;     // on quadruples built with next_tau
  double max_relative_factor = 0.0;  // |det - factored| / scale on free quadruples
};

JacobianSweep jacobian_sweep(int samples, std::uint64_t seed = 42);

// Two consecutive junction states of the third-order chain with x2 = M2, x1 = 0.
struct N3JunctionPair {
  double m0 = 1.0;
  double m2 = 1.0;
  double x3_start = 0.0;
  double x3_end = 1.0;
};

struct N3ShortcutReport {
  double shortcut_time = 0.0;       // (x3_end - x3_start) / M2 along x2 = M2
  std::vector<double> dips;         // depth M2 - min x2 of each excursion
  std::vector<double> excursion_times;
  double min_excess = 0.0;          // min over excursions of time - shortcut_time
  bool excess_increasing = true;    // excess strictly increasing in the dip
};

N3ShortcutReport check_n3_shortcut(const N3JunctionPair& p, int n_samples = 64);

}  // namespace citopt
