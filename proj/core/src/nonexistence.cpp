#include "citopt/nonexistence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "citopt/dynamics.hpp"
#include "citopt/error.hpp"

namespace citopt {

double fc(double xi, double xi1, double xi2) {
  const double a = xi1 * xi1 - xi2 * xi2;
  const double b = xi1 * xi1 * xi1 + 2 * xi1 * xi1 * xi2 - xi2 * xi2 * xi2;
  const double c = -xi1 * xi1 * xi1 * xi2 - 2 * xi1 * xi1 * xi2 * xi2 + xi2 * xi2 * xi2 * xi2;
  return a * xi * xi + b * xi + c;
}

double next_tau(double tau_i, double tau_ip1) {
  if (!(tau_ip1 > 0 && tau_ip1 < tau_i)) fail(ErrorCode::OrderViolated, "need 0 < tau_{i+1} < tau_i");
  const double x1 = tau_i, x2 = tau_ip1;
  const double a = x1 * x1 - x2 * x2;
  const double b = x1 * x1 * x1 + 2 * x1 * x1 * x2 - x2 * x2 * x2;
  const double c = -x1 * x1 * x1 * x2 - 2 * x1 * x1 * x2 * x2 + x2 * x2 * x2 * x2;
  // a > 0 and c < 0, so exactly one root is positive; b > 0 keeps this form free of cancellation.
  return -2 * c / (b + std::sqrt(b * b - 4 * a * c));
}

double next_r(double r) {
  if (!(r > 0 && r < 1)) fail(ErrorCode::OrderViolated, "r must lie in (0, 1)");
  const double a = 3 + 1 / (r * (1 - r));
  return 2 / (a + std::sqrt(a * a - 4));
}

RecursionReport run_recursion(double tau1, double tau2, int n_steps, int tau_steps) {
  if (n_steps < 10) fail(ErrorCode::InvalidArgument, "n_steps must be at least 10");
  if (!(tau2 > 0 && tau2 < tau1)) fail(ErrorCode::OrderViolated, "need 0 < tau2 < tau1");
  RecursionReport rep;
  auto& taus = rep.state.taus;
  auto& rs = rep.state.rs;
  taus.reserve(static_cast<size_t>(n_steps) + 1);
  rs.reserve(static_cast<size_t>(n_steps));
  taus = {tau1, tau2};
  rs.push_back(1 - tau2 / tau1);
  for (int i = 1; i < n_steps; ++i) {
    const size_t k = static_cast<size_t>(i);
    double t, r;
    if (i < tau_steps) {
      t = next_tau(taus[k - 1], taus[k]);
      r = 1 - t / taus[k];
    } else {
      r = next_r(rs.back());
      t = taus[k] * (1 - r);
    }
    if (!(t < taus[k] && t > 0 && r < rs.back())) rep.strictly_decreasing = false;
    taus.push_back(t);
    rs.push_back(r);
  }
  rep.partial_sums.resize(taus.size());
  double s = 0.0;
  for (size_t i = 0; i < taus.size(); ++i) rep.partial_sums[i] = s += taus[i];
  const double n = n_steps, rn = rs.back();
  rep.i_r_tail = n * rn;
  rep.raabe_tail = n * (taus[taus.size() - 2] / taus.back() - 1);
  return rep;
}

void write_recursion_csv(std::ostream& os, const RecursionReport& r, int stride) {
  if (stride < 1) fail(ErrorCode::InvalidArgument, "stride must be positive");
  os << "i,tau_i,r_i,i_times_r_i,raabe\n";
  const auto& taus = r.state.taus;
  const auto& rs = r.state.rs;
  char buf[160];
  for (size_t k = 0; k < rs.size(); ++k) {
    const size_t i = k + 1;
    if (i % static_cast<size_t>(stride) != 0 && k + 1 != rs.size() && k != 0) continue;
    const double di = static_cast<double>(i);
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", i, taus[k], rs[k], di * rs[k],
                  di * (taus[k] / taus[k + 1] - 1));
    os << buf;
  }
}

std::array<double, 3> junction_sums(const std::array<double, 4>& t) {
  double f1 = 0, f2 = 0, f3 = 0;
  for (int j = 0; j < 4; ++j) {
    double tail = 0;
    for (int k = j + 1; k < 4; ++k) tail += t[k];
    f1 += t[j];
    f2 += t[j] * t[j] * t[j];
    f3 += t[j] * t[j] * t[j] * (t[j] + 2 * tail);
  }
  return {f1, f2, f3};
}

JacobianCheck jacobian_check(const std::array<double, 4>& t) {
  double J[3][3];
  for (int m = 0; m < 3; ++m) {
    double tail = 0, head = 0;
    for (int k = m + 1; k < 4; ++k) tail += t[k];
    for (int j = 0; j < m; ++j) head += t[j] * t[j] * t[j];
    J[0][m] = 1.0;
    J[1][m] = 3 * t[m] * t[m];
    J[2][m] = 4 * t[m] * t[m] * t[m] + 6 * t[m] * t[m] * tail + 2 * head;
  }
  JacobianCheck c;
  static const int perm[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}};
  for (int p = 0; p < 6; ++p) {
    const double term = J[0][perm[p][0]] * J[1][perm[p][1]] * J[2][perm[p][2]];
    c.det += p < 3 ? term : -term;
    c.scale += std::abs(term);
  }
  c.factored = 6 * (t[1] + t[2]) * fc(t[2], t[0], t[1]);
  return c;
}

JacobianSweep jacobian_sweep(int samples, std::uint64_t seed) {
  if (samples < 1) fail(ErrorCode::InvalidArgument, "samples must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> big(0.5, 2.0), frac(0.05, 0.95);
  JacobianSweep s;
  s.samples = samples;
  for (int i = 0; i < samples; ++i) {
    const double t0 = big(rng), t1 = t0 * frac(rng);
    const double t2 = next_tau(t0, t1);
    const double t3 = next_tau(t1, t2);
    const auto on = jacobian_check({t0, t1, t2, t3});
    s.max_relative_det = std::max(s.max_relative_det, std::abs(on.det) / on.scale);
    const auto free = jacobian_check({t0, t1, t1 * frac(rng), t0 * frac(rng)});
    s.max_relative_factor = std::max(s.max_relative_factor, std::abs(free.det - free.factored) / free.scale);
  }
  return s;
}

N3ShortcutReport check_n3_shortcut(const N3JunctionPair& p, int n_samples) {
  const double L = p.x3_end - p.x3_start;
  if (!(p.m0 > 0) || !(p.m2 > 0)) fail(ErrorCode::InvalidJunctionPair, "bounds must be positive");
  if (!(L > 0)) fail(ErrorCode::InvalidJunctionPair, "junction pair has no positive x3 gap");
  if (n_samples < 2) fail(ErrorCode::InvalidArgument, "need at least two samples");

  N3ShortcutReport rep;
  rep.shortcut_time = L / p.m2;
  // Excursion u = (-M0, +M0, -M0) for (tau, 2 tau, tau) leaves and rejoins x2 = M2.
  // It must fit in the gap and keep x2 >= -M2.
  const double tau_dip = std::sqrt(2 * p.m2 / p.m0);
  auto covered = [&](double tau) { return 4 * tau * p.m2 - 2 * p.m0 * tau * tau * tau; };
  double tau_max = tau_dip;
  const double tau_peak = std::sqrt(2 * p.m2 / (3 * p.m0));
  if (covered(std::min(tau_peak, tau_dip)) > L) {
    double lo = 0, hi = std::min(tau_peak, tau_dip);
    for (int k = 0; k < 200; ++k) {
      const double m = 0.5 * (lo + hi);
      (covered(m) > L ? hi : lo) = m;
    }
    tau_max = lo;
  }
  rep.min_excess = INFINITY;
  double prev = -INFINITY;
  for (int k = 1; k <= n_samples; ++k) {
    const double tau = tau_max * k / n_samples;
    PiecewiseControl pc;
    pc.add(tau, -p.m0);
    pc.add(2 * tau, p.m0);
    pc.add(tau, -p.m0);
    const StateVector x0{0.0, p.m2, p.x3_start};
    const StateVector x = propagate(x0, pc);
    const auto ext = extents(sample(x0, pc, 4 * tau));
    const double gained = x[2] - p.x3_start;
    if (gained > L * (1 + 1e-12)) continue;
    // Remaining gap is covered on the constraint at full M2.
    const double time = pc.duration() + (L - gained) / p.m2;
    const double excess = time - rep.shortcut_time;
    rep.dips.push_back(p.m2 - ext[1].min);
    rep.excursion_times.push_back(time);
    rep.min_excess = std::min(rep.min_excess, excess);
    if (!(excess > prev)) rep.excess_increasing = false;
    prev = excess;
  }
  if (rep.dips.empty()) fail(ErrorCode::InvalidJunctionPair, "no excursion fits between the junctions");
  return rep;
}

}  // namespace citopt
