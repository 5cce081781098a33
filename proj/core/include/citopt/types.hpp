#pragma once

#include <array>
#include <optional>
#include <vector>

namespace citopt {

// A box limit that is either a positive number or explicitly unbounded.
class Bound {
 public:
  static Bound of(double m) { return Bound(m); }
  static Bound unbounded() { return Bound(); }

  bool finite() const { return m_.has_value(); }
  // +inf when unbounded.
  double value() const;
  // |x| <= M + 1e-9 * max(1, M); always true when unbounded.
  bool admits(double x) const;

  bool operator==(const Bound&) const = default;

 private:
  Bound() = default;
  explicit Bound(double m) : m_(m) {}
  std::optional<double> m_;
};

// Limits (M0, M1, ..., Mn) of a chain of n integrators.
struct Bounds {
  int order = 0;
  std::vector<Bound> m;

  double control() const { return m.at(0).value(); }
  const Bound& state(int k) const { return m.at(static_cast<size_t>(k)); }
};

void validate_bounds(const Bounds& b);

// x[0] is x_1 (first integral of u), ..., x[n-1] is x_n.
using StateVector = std::vector<double>;

bool feasible(const StateVector& x, const Bounds& b);

struct Segment {
  double duration = 0.0;
  double level = 0.0;
  bool operator==(const Segment&) const = default;
};

struct PiecewiseControl {
  double t0 = 0.0;
  std::vector<Segment> segments;

  // Zero-length segments are dropped; negative durations are rejected.
  void add(double duration, double level);
  void append(const PiecewiseControl& other);
  double duration() const;
  double t_end() const { return t0 + duration(); }
  // Throws InvalidArgument if some |level| exceeds M0.
  void validate(const Bounds& b) const;
};

struct Sample {
  double t = 0.0;
  StateVector x;
  // Control held on [t, next sample time).
  double u = 0.0;
};

struct Trajectory {
  std::vector<Sample> samples;
  double t_f = 0.0;
  double cost = 0.0;

  int order() const { return samples.empty() ? 0 : static_cast<int>(samples.front().x.size()); }
};

struct ChatteringConstants {
  double alpha = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  double beta3 = 0.0;
  double tau1 = 0.0;
  double tau_inf = 0.0;
  double j1 = 0.0;
  double j_star = 0.0;

  std::array<double, 3> betas() const { return {beta1, beta2, beta3}; }
};

// Cubic switching function p1 of the scaled problem on one chattering interval.
struct CostateArc {
  double p0 = 0.0;
  int interval_index = 1;
  double tau_start = 0.0;
  double tau_end = 0.0;
  std::array<double, 3> roots{};
  double mu = 0.0;

  double p1(double tau) const;
  double p2(double tau) const;
  double p3(double tau) const;
};

}  // namespace citopt
