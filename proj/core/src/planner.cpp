#include "citopt/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "citopt/chattering.hpp"
#include "citopt/error.hpp"
#include "citopt/poly.hpp"

namespace citopt {

namespace {

double lambda_of(const TransferSpec& s) { return -s.x01 / s.m0; }

PiecewiseControl mirrored(const PiecewiseControl& pc) {
  PiecewiseControl out;
  for (auto it = pc.segments.rbegin(); it != pc.segments.rend(); ++it) out.add(it->duration, -it->level);
  return out;
}

struct Entry {
  double x01 = 0.0;
  double loss = 0.0;
};

double finite_or(const Bound& b, double fallback) { return b.finite() ? b.value() : fallback; }

void check_rest_bounds(const Bounds& b) {
  validate_bounds(b);
  if (b.order != 4) fail(ErrorCode::OrderMismatch, "rest-to-rest planning needs a fourth-order chain");
  if (!b.state(3).finite()) fail(ErrorCode::CruiseImpossible, "the cruise arc needs a finite M3");
}

Entry optimal_entry(const Bounds& b, const ChatteringConstants& c, double tol) {
  const double m1 = finite_or(b.state(1), 1e6);
  auto loss = [&](double x01) {
    try {
      return entry_loss(b, c, x01);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SubPlannerFailure) throw;
      return std::numeric_limits<double>::infinity();
    }
  };
  const auto m = golden_section(loss, -m1, -1e-6 * m1, tol);
  if (!std::isfinite(m.fx)) fail(ErrorCode::SubPlannerFailure, "no admissible tangency state");
  return {m.x, m.fx};
}

}  // namespace

void validate_transfer(const TransferSpec& s) {
  if (!(s.m0 > 0) || !std::isfinite(s.m0)) fail(ErrorCode::NonPositiveBound, "M0 must be positive and finite");
  if (!(s.m3 > 0) || !std::isfinite(s.m3)) fail(ErrorCode::NonPositiveBound, "M3 must be positive and finite");
  if (!(s.x01 < 0)) fail(ErrorCode::InvalidArgument, "x01 must be negative");
}

double min_displacement(const TransferSpec& s, const ChatteringConstants& c) {
  const double l = lambda_of(s);
  return l * (std::pow(s.x01, 3) / (s.m0 * s.m0) * c.j_star + s.m3 * c.tau_inf);
}

PiecewiseControl map_control_to_physical(const TransferSpec& s, const PiecewiseControl& v) {
  const double l = lambda_of(s);
  PiecewiseControl u;
  u.t0 = l * v.t0;
  for (const auto& seg : v.segments) u.add(l * seg.duration, -s.m0 * seg.level);
  return u;
}

Trajectory map_scaled_to_physical(const TransferSpec& s, const Trajectory& y) {
  validate_transfer(s);
  if (y.order() != 4 && !y.samples.empty())
    fail(ErrorCode::OrderMismatch, "scaled trajectory must carry the integral of y3");
  const double l = lambda_of(s), a = s.x01, m0 = s.m0;
  Trajectory x;
  x.t_f = l * y.t_f;
  x.cost = y.cost;
  x.samples.reserve(y.samples.size());
  for (const auto& p : y.samples) {
    Sample q;
    q.t = l * p.t;
    q.u = -m0 * p.u;
    q.x = {a * p.x[0], -(a * a / m0) * p.x[1], (a * a * a / (m0 * m0)) * p.x[2] + s.m3,
           -(a * a * a * a / (m0 * m0 * m0)) * p.x[3] + s.m3 * q.t + s.x04};
    x.samples.push_back(std::move(q));
  }
  return x;
}

Trajectory map_physical_to_scaled(const TransferSpec& s, const Trajectory& x) {
  validate_transfer(s);
  if (x.order() != 4 && !x.samples.empty()) fail(ErrorCode::OrderMismatch, "physical trajectory must be fourth order");
  const double l = lambda_of(s), a = s.x01, m0 = s.m0;
  Trajectory y;
  y.t_f = x.t_f / l;
  y.cost = x.cost;
  y.samples.reserve(x.samples.size());
  for (const auto& p : x.samples) {
    Sample q;
    q.t = p.t / l;
    q.u = -p.u / m0;
    q.x = {p.x[0] / a, -p.x[1] * m0 / (a * a), (p.x[2] - s.m3) * m0 * m0 / (a * a * a),
           -(p.x[3] - s.m3 * p.t - s.x04) * m0 * m0 * m0 / (a * a * a * a)};
    y.samples.push_back(std::move(q));
  }
  return y;
}

TransferSolution solve_transfer(const TransferSpec& s, const ChatteringConstants& c, int n_cycles, double dt) {
  validate_transfer(s);
  const double need = min_displacement(s, c);
  const double have = s.xf4 - s.x04;
  if (have < need - 1e-12 * std::max(1.0, std::abs(need)))
    fail(ErrorCode::DisplacementTooSmall, "xf4 - x04 is below the chattering displacement");

  TransferSolution sol;
  const double l = lambda_of(s);
  sol.cycles = chattering_cycle_count(c, n_cycles);
  sol.t_inf = l * c.tau_inf;
  sol.t_f = have / s.m3 + std::pow(s.x01, 4) * c.j_star / (std::pow(s.m0, 3) * s.m3);
  sol.x_inf4 = s.x04 + s.m3 * sol.t_inf - std::pow(s.x01, 4) * c.j_star / std::pow(s.m0, 3);

  const StateVector x0{s.x01, 0.0, s.m3, s.x04};
  StateVector x = x0;
  for (int i = 1; i <= sol.cycles; ++i) {
    const PiecewiseControl cyc = map_control_to_physical(s, build_cycle_control(c, i));
    x = propagate(x, cyc);
    sol.control.append(cyc);
    sol.junction_times.push_back(l * junction_time(c, i));
    sol.junction_states.push_back(x);
  }
  // Cycles below double precision are dropped; the cruise absorbs the remainder.
  sol.control.add(std::max(0.0, sol.t_f - sol.control.duration()), 0.0);
  sol.trajectory = sample(x0, sol.control, dt);
  sol.trajectory.t_f = sol.t_f;
  sol.trajectory.cost = sol.t_f;
  return sol;
}

double transfer_audit(const TransferSpec& s, const Trajectory& x) {
  if (x.order() != 4) fail(ErrorCode::OrderMismatch, "transfer trajectories are fourth order");
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& p : x.samples) worst = std::max(worst, std::abs(p.u) - s.m0);
  return std::max(worst, extents(x)[2].max - s.m3);
}

MimSolution solve_transfer_mim(const TransferSpec& s, double dt) {
  validate_transfer(s);
  const AlphaFamilyPoint p = family_point(0.0);
  const double l = lambda_of(s);
  MimSolution m;
  m.j = p.j;
  m.t_inf = l * p.tau1;
  const double need = l * (std::pow(s.x01, 3) / (s.m0 * s.m0) * p.j + s.m3 * p.tau1);
  const double have = s.xf4 - s.x04;
  if (have < need - 1e-12 * std::max(1.0, std::abs(need)))
    fail(ErrorCode::DisplacementTooSmall, "xf4 - x04 is below the direct-entry displacement");
  m.t_f = have / s.m3 + std::pow(s.x01, 4) * p.j / (std::pow(s.m0, 3) * s.m3);
  m.control = map_control_to_physical(s, family_cycle(p));
  m.control.add(std::max(0.0, m.t_f - m.control.duration()), 0.0);
  m.trajectory = sample({s.x01, 0.0, s.m3, s.x04}, m.control, dt);
  m.trajectory.t_f = m.t_f;
  m.trajectory.cost = m.t_f;
  return m;
}

RestToRestSpec RestToRestSpec::symmetric(const Bounds& b) {
  validate_bounds(b);
  if (b.order != 4 || !b.state(4).finite())
    fail(ErrorCode::InvalidArgument, "symmetric rest-to-rest needs a finite M4");
  const double m4 = b.state(4).value();
  return {b, -m4, m4};
}

PiecewiseControl tangency_transfer(const Bounds& b, double x01) {
  const double m0 = b.control();
  const double m1 = b.state(1).value(), m2 = b.state(2).value(), m3 = b.state(3).value();
  if (x01 > 0 || -x01 > m1 * (1 + 1e-12))
    fail(ErrorCode::SubPlannerFailure, "tangency jerk outside [-M1, 0]");

  auto build = [&](double A, double Tb) {
    const double ju = std::min(m1, std::sqrt(m0 * A));
    const double ta = std::max(0.0, A / ju - ju / m0);
    double jd = std::sqrt(m0 * A + x01 * x01 / 2), tc = 0.0;
    if (jd > m1) {
      jd = m1;
      tc = std::max(0.0, (A - m1 * m1 / m0 + x01 * x01 / (2 * m0)) / m1);
    }
    PiecewiseControl pc;
    pc.add(ju / m0, m0);
    pc.add(ta, 0.0);
    pc.add(ju / m0, -m0);
    pc.add(Tb, 0.0);
    pc.add(jd / m0, -m0);
    pc.add(tc, 0.0);
    pc.add(std::max(0.0, (jd + x01) / m0), m0);
    return pc;
  };
  auto x3_of = [&](double A) { return propagate({0.0, 0.0, 0.0}, build(A, 0.0))[2]; };

  const double a_min = x01 * x01 / (2 * m0);
  if (x3_of(a_min) > m3 * (1 + 1e-12))
    fail(ErrorCode::SubPlannerFailure, "velocity bound overshoots before the tangency state");
  double a_max = m2;
  if (!std::isfinite(a_max)) {
    a_max = std::max(1.0, 2 * a_min);
    while (x3_of(a_max) < m3) a_max *= 2;
  }
  if (a_max < a_min) fail(ErrorCode::SubPlannerFailure, "acceleration bound below the tangency need");
  if (x3_of(a_max) <= m3) return build(a_max, (m3 - x3_of(a_max)) / a_max);
  const double A = bisect([&](double q) { return x3_of(q) - m3; }, a_min, a_max, 1e-16);
  return build(A, 0.0);
}

double entry_loss(const Bounds& b, const ChatteringConstants& c, double x01) {
  const double m0 = b.control(), m3 = b.state(3).value();
  const PiecewiseControl pc = tangency_transfer(b, x01);
  const StateVector x = propagate({0.0, 0.0, 0.0, 0.0}, pc);
  return pc.duration() - x[3] / m3 + std::pow(x01, 4) * c.j_star / (std::pow(m0, 3) * m3);
}

RestToRestResult plan_rest_to_rest(const RestToRestSpec& s, const ChatteringConstants& c, double tol, double dt) {
  check_rest_bounds(s.bounds);
  const Bounds& b = s.bounds;
  const double m0 = b.control(), m3 = b.state(3).value();
  const double D = s.xf4 - s.x04;
  if (!(D > 0)) fail(ErrorCode::CruiseImpossible, "xf4 must exceed x04");

  RestToRestResult r;
  const Entry e = optimal_entry(b, c, tol);
  r.x01_opt = e.x01;
  r.loss_opt = e.loss;
  r.t_f_opt = 2 * e.loss + D / m3;
  r.loss_mim = entry_loss(b, c, 0.0);
  r.t_f_mim = 2 * r.loss_mim + D / m3;

  const PiecewiseControl phase1 = tangency_transfer(b, e.x01);
  const TransferSpec tr{m0, m3, e.x01, 0.0, 0.0};
  PiecewiseControl acc = phase1;
  acc.append(map_control_to_physical(tr, build_chattering_schedule(c)));
  const StateVector xa = propagate({0.0, 0.0, 0.0, 0.0}, acc);
  const double cruise = D - 2 * xa[3];
  if (cruise < -1e-9 * D) fail(ErrorCode::CruiseImpossible, "displacement too short for a cruise arc");
  const PiecewiseControl mim_phase = tangency_transfer(b, 0.0);
  if (D - 2 * propagate({0.0, 0.0, 0.0, 0.0}, mim_phase)[3] < -1e-9 * D)
    fail(ErrorCode::CruiseImpossible, "displacement too short for the direct-entry baseline");

  r.t_inf = phase1.duration() + lambda_of(tr) * c.tau_inf;
  r.control = acc;
  r.control.add(std::max(0.0, cruise) / m3, 0.0);
  r.control.append(mirrored(acc));
  r.trajectory = sample({0.0, 0.0, 0.0, s.x04}, r.control, dt);
  r.trajectory.t_f = r.control.duration();
  r.trajectory.cost = r.t_f_opt;
  r.audit = audit(r.trajectory, b);
  return r;
}

GapSurface gap_surface(const RestToRestSpec& base, const ChatteringConstants& c, GapAxes axes,
                       const std::vector<double>& p, const std::vector<double>& q) {
  GapSurface g;
  g.axes = axes;
  g.p = p;
  g.q = q;
  const int i0 = axes == GapAxes::M0M1 ? 0 : 1;
  g.gap.assign(p.size(), std::vector<double>(q.size(), std::numeric_limits<double>::quiet_NaN()));
  for (size_t i = 0; i < p.size(); ++i)
    for (size_t j = 0; j < q.size(); ++j) {
      try {
        Bounds b = base.bounds;
        b.m[static_cast<size_t>(i0)] = Bound::of(p[i]);
        b.m[static_cast<size_t>(i0 + 1)] = Bound::of(q[j]);
        check_rest_bounds(b);
        const double D = base.xf4 - base.x04;
        const Entry e = optimal_entry(b, c, 1e-10);
        const double mim = entry_loss(b, c, 0.0);
        // Both profiles must leave room for the cruise arc.
        const double m3 = b.state(3).value();
        const double chat = m3 * (-e.x01 / b.control()) * c.tau_inf -
                            std::pow(e.x01, 4) * c.j_star / std::pow(b.control(), 3);
        const double d_opt = propagate({0, 0, 0, 0}, tangency_transfer(b, e.x01))[3] + chat;
        const double d_mim = propagate({0, 0, 0, 0}, tangency_transfer(b, 0.0))[3];
        if (D < 2 * d_opt || D < 2 * d_mim) continue;
        g.gap[i][j] = 2 * (mim - e.loss);
      } catch (const Error&) {
      }
    }
  return g;
}

void write_gap_csv(std::ostream& os, const GapSurface& g) {
  os << (g.axes == GapAxes::M0M1 ? "m0,m1,gap\n" : "m1,m2,gap\n");
  char buf[128];
  for (size_t i = 0; i < g.p.size(); ++i)
    for (size_t j = 0; j < g.q.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", g.p[i], g.q[j], g.gap[i][j]);
      os << buf;
    }
}

}  // namespace citopt
