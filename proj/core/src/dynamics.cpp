#include "citopt/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "citopt/error.hpp"
#include "citopt/poly.hpp"

namespace citopt {

namespace {

void require_state(const StateVector& x) {
  if (x.empty()) fail(ErrorCode::OrderMismatch, "state vector is empty");
}

}  // namespace

StateVector propagate_segment(const StateVector& x, double T, double u) {
  const size_t n = x.size();
  StateVector out(n);
  // powers[j] = T^j / j!
  std::vector<double> powers(n + 1);
  powers[0] = 1.0;
  for (size_t j = 1; j <= n; ++j) powers[j] = powers[j - 1] * T / static_cast<double>(j);
  for (size_t k = 1; k <= n; ++k) {
    double v = u * powers[k];
    for (size_t j = 0; j < k; ++j) v += x[k - 1 - j] * powers[j];
    out[k - 1] = v;
  }
  return out;
}

StateVector propagate(const StateVector& x0, const PiecewiseControl& pc) {
  require_state(x0);
  StateVector x = x0;
  for (const auto& s : pc.segments) x = propagate_segment(x, s.duration, s.level);
  return x;
}

std::vector<StateVector> boundary_states(const StateVector& x0, const PiecewiseControl& pc) {
  require_state(x0);
  std::vector<StateVector> out;
  out.reserve(pc.segments.size() + 1);
  out.push_back(x0);
  for (const auto& s : pc.segments) out.push_back(propagate_segment(out.back(), s.duration, s.level));
  return out;
}

StateVector state_at(const StateVector& x0, const PiecewiseControl& pc, double t) {
  require_state(x0);
  StateVector x = x0;
  double tb = pc.t0;
  for (const auto& s : pc.segments) {
    if (t <= tb + s.duration) return propagate_segment(x, std::max(0.0, t - tb), s.level);
    x = propagate_segment(x, s.duration, s.level);
    tb += s.duration;
  }
  return x;
}

std::vector<double> segment_polynomial(const StateVector& x, double u, int k) {
  std::vector<double> c(static_cast<size_t>(k) + 1);
  double fact = 1.0;
  for (int j = 0; j < k; ++j) {
    if (j > 0) fact *= j;
    c[static_cast<size_t>(j)] = x[static_cast<size_t>(k - 1 - j)] / fact;
  }
  fact *= k;
  c[static_cast<size_t>(k)] = u / fact;
  return c;
}

Trajectory sample(const StateVector& x0, const PiecewiseControl& pc, double dt) {
  require_state(x0);
  if (!(dt > 0.0)) fail(ErrorCode::InvalidArgument, "dt must be positive");
  const auto xs = boundary_states(x0, pc);
  std::vector<double> tb(pc.segments.size() + 1);
  tb[0] = pc.t0;
  for (size_t i = 0; i < pc.segments.size(); ++i) tb[i + 1] = tb[i] + pc.segments[i].duration;
  const double tf = tb.back();

  std::vector<double> times(tb.begin(), tb.end());
  const double span = tf - pc.t0;
  const auto steps = static_cast<long long>(std::floor(span / dt));
  for (long long i = 1; i <= steps; ++i) {
    const double t = pc.t0 + static_cast<double>(i) * dt;
    if (t < tf) times.push_back(t);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  Trajectory traj;
  traj.samples.reserve(times.size());
  size_t seg = 0;
  for (double t : times) {
    // Last segment whose start is <= t; the final sample sits on the last boundary.
    while (seg + 1 < tb.size() && tb[seg + 1] <= t) ++seg;
    Sample s;
    s.t = t;
    if (seg >= pc.segments.size()) {
      s.x = xs.back();
      s.u = pc.segments.empty() ? 0.0 : pc.segments.back().level;
    } else {
      s.x = propagate_segment(xs[seg], t - tb[seg], pc.segments[seg].level);
      s.u = pc.segments[seg].level;
    }
    traj.samples.push_back(std::move(s));
  }
  traj.t_f = tf;
  return traj;
}

double integral_cost(const StateVector& x0, const PiecewiseControl& pc, int k) {
  require_state(x0);
  if (k < 1 || k > static_cast<int>(x0.size()))
    fail(ErrorCode::OrderMismatch, "component index outside state");
  StateVector x = x0;
  double total = 0.0;
  for (const auto& s : pc.segments) {
    // Antiderivative of x_k(s) evaluated at T.
    const auto c = segment_polynomial(x, s.level, k);
    double v = 0.0;
    for (size_t j = c.size(); j-- > 0;) v = (v + c[j] / static_cast<double>(j + 1)) * s.duration;
    total += v;
    x = propagate_segment(x, s.duration, s.level);
  }
  return total;
}

std::vector<ComponentExtent> extents(const Trajectory& traj) {
  const int n = traj.order();
  std::vector<ComponentExtent> out(static_cast<size_t>(n));
  if (traj.samples.empty()) return out;
  for (int k = 1; k <= n; ++k) {
    auto& e = out[static_cast<size_t>(k - 1)];
    e.min = e.max = traj.samples.front().x[static_cast<size_t>(k - 1)];
    e.t_min = e.t_max = traj.samples.front().t;
  }
  auto visit = [&](int k, double v, double t) {
    auto& e = out[static_cast<size_t>(k - 1)];
    if (v < e.min) {
      e.min = v;
      e.t_min = t;
    }
    if (v > e.max) {
      e.max = v;
      e.t_max = t;
    }
  };
  for (size_t i = 0; i < traj.samples.size(); ++i) {
    const auto& s = traj.samples[i];
    for (int k = 1; k <= n; ++k) visit(k, s.x[static_cast<size_t>(k - 1)], s.t);
    if (i + 1 == traj.samples.size()) break;
    const double h = traj.samples[i + 1].t - s.t;
    if (!(h > 0.0)) continue;
    for (int k = 2; k <= n; ++k) {
      const auto c = segment_polynomial(s.x, s.u, k);
      for (double r : real_roots(poly_derivative(c), 0.0, h))
        if (r > 0.0 && r < h) visit(k, poly_eval(c, r), s.t + r);
    }
  }
  return out;
}

double AuditReport::worst() const {
  double w = -std::numeric_limits<double>::infinity();
  for (double v : max_violation) w = std::max(w, v);
  return w;
}

AuditReport audit(const Trajectory& traj, const Bounds& b) {
  const int n = traj.order();
  if (n != 0 && n != b.order) fail(ErrorCode::OrderMismatch, "trajectory order differs from bounds");
  AuditReport rep;
  const double ninf = -std::numeric_limits<double>::infinity();
  rep.max_violation.assign(static_cast<size_t>(b.order) + 1, ninf);
  rep.argmax_time.assign(static_cast<size_t>(b.order) + 1, 0.0);
  if (traj.samples.empty()) return rep;

  const double m0 = b.control();
  for (size_t i = 0; i + 1 < traj.samples.size(); ++i) {
    const double v = std::abs(traj.samples[i].u) - m0;
    if (v > rep.max_violation[0]) {
      rep.max_violation[0] = v;
      rep.argmax_time[0] = traj.samples[i].t;
    }
  }
  const auto ext = extents(traj);
  for (int k = 1; k <= b.order; ++k) {
    if (!b.state(k).finite()) continue;
    const auto& e = ext[static_cast<size_t>(k - 1)];
    const double mk = b.state(k).value();
    const double vmax = e.max - mk, vmin = -e.min - mk;
    auto& slot = rep.max_violation[static_cast<size_t>(k)];
    if (vmax >= vmin) {
      slot = vmax;
      rep.argmax_time[static_cast<size_t>(k)] = e.t_max;
    } else {
      slot = vmin;
      rep.argmax_time[static_cast<size_t>(k)] = e.t_min;
    }
  }
  return rep;
}

void write_csv(std::ostream& os, const Trajectory& traj) {
  const int n = traj.order();
  os << "t,u";
  for (int k = 1; k <= n; ++k) os << ",x" << k;
  os << '\n';
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (const auto& s : traj.samples) {
    put(s.t);
    os << ',';
    put(s.u);
    for (double v : s.x) {
      os << ',';
      put(v);
    }
    os << '\n';
  }
}

}  // namespace citopt
