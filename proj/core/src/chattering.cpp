#include "citopt/chattering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "citopt/dynamics.hpp"
#include "citopt/error.hpp"
#include "citopt/poly.hpp"

namespace citopt {

namespace {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

bool solve3(Mat3 A, Vec3 b, Vec3& x) {
  for (int c = 0; c < 3; ++c) {
    int p = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(A[r][c]) > std::abs(A[p][c])) p = r;
    if (std::abs(A[p][c]) < 1e-300) return false;
    std::swap(A[p], A[c]);
    std::swap(b[p], b[c]);
    for (int r = c + 1; r < 3; ++r) {
      const double f = A[r][c] / A[c][c];
      for (int k = c; k < 3; ++k) A[r][k] -= f * A[c][k];
      b[r] -= f * b[c];
    }
  }
  for (int r = 2; r >= 0; --r) {
    double s = b[r];
    for (int k = r + 1; k < 3; ++k) s -= A[r][k] * x[k];
    x[r] = s / A[r][r];
  }
  return true;
}

// Reduced system in (alpha, beta1, beta2) with beta3 eliminated.
Vec3 reduced_residual(const Vec3& z) {
  const double a = z[0], b1 = z[1], b2 = z[2];
  const double b3 = beta3_from(a, b1, b2);
  const double s1 = b1 + b2 + b3;
  const double s2 = b1 * b2 + b3 * (b1 + b2);
  return {4 * b1 * b1 * b1 - 6 * b1 * b1 - 4 * b2 * b2 * b2 + 6 * b2 * b2 - 1,
          (2 * b1 * b1 - 2 * b2 * b2 + 1) * (a - 1) - (4 * b1 - 4 * b2 + 2) * a,
          2 * s1 + (a * a - 1) * s2 - 3};
}

double norm_inf(const Vec3& v) {
  return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
}

bool in_box(const Vec3& z) {
  return z[0] > 0 && z[0] < 1 && z[1] > 0 && z[1] < z[2] && z[2] < 1;
}

bool newton(Vec3& z) {
  Vec3 f = reduced_residual(z);
  for (int it = 0; it < 100; ++it) {
    const double fn = norm_inf(f);
    if (!std::isfinite(fn)) return false;
    if (fn < 1e-15) return true;
    Mat3 J{};
    for (int c = 0; c < 3; ++c) {
      const double h = 1e-7 * std::max(1.0, std::abs(z[c]));
      Vec3 zp = z, zm = z;
      zp[c] += h;
      zm[c] -= h;
      const Vec3 fp = reduced_residual(zp), fm = reduced_residual(zm);
      for (int r = 0; r < 3; ++r) J[r][c] = (fp[r] - fm[r]) / (2 * h);
    }
    Vec3 dz{};
    if (!solve3(J, {-f[0], -f[1], -f[2]}, dz)) return false;
    double lam = 1.0;
    bool moved = false;
    for (int k = 0; k < 40; ++k, lam *= 0.5) {
      const Vec3 zn{z[0] + lam * dz[0], z[1] + lam * dz[1], z[2] + lam * dz[2]};
      const Vec3 fnew = reduced_residual(zn);
      if (norm_inf(fnew) < fn) {
        z = zn;
        f = fnew;
        moved = true;
        break;
      }
    }
    if (!moved) return fn < 1e-13;
  }
  return norm_inf(f) < 1e-13;
}

ChatteringConstants assemble(const Vec3& z) {
  ChatteringConstants c;
  c.alpha = z[0];
  c.beta1 = z[1];
  c.beta2 = z[2];
  c.beta3 = beta3_from(c.alpha, c.beta1, c.beta2);
  c.tau1 = (1 - c.alpha) / (1 + 2 * c.beta1 - 2 * c.beta2);
  c.tau_inf = c.tau1 / (1 - c.alpha);
  c.j1 = integral_cost({1.0, 0.0, 0.0}, build_cycle_control(c, 1), 3);
  c.j_star = c.j1 / (1 - std::pow(c.alpha, 4));
  return c;
}

PiecewiseControl cycle_from(double b1, double b2, double len, double t0) {
  PiecewiseControl pc;
  pc.t0 = t0;
  pc.add(b1 * len, -1.0);
  pc.add((b2 - b1) * len, 1.0);
  pc.add((1 - b2) * len, -1.0);
  return pc;
}

// h(b) = 4b^3 - 6b^2 decreases from 0 to -2 on [0, 1].
double beta2_from_beta1(double b1) {
  auto h = [](double b) { return 4 * b * b * b - 6 * b * b; };
  const double target = h(b1) - 1.0;
  return bisect([&](double b) { return h(b) - target; }, 0.0, 1.0, 1e-16);
}

}  // namespace

std::array<double, 5> constants_residuals(const ChatteringConstants& c) {
  const double a = c.alpha, b1 = c.beta1, b2 = c.beta2, b3 = c.beta3, t = c.tau1;
  const double u1 = 1 - b1, u2 = 1 - b2;
  const double s1 = b1 + b2 + b3;
  const double s2 = b1 * b2 + b1 * b3 + b2 * b3;
  return {(1 - 2 * u1 + 2 * u2) * t - (1 - a), (1 - 2 * u1 * u1 + 2 * u2 * u2) * t - 2,
          (1 - 2 * u1 * u1 * u1 + 2 * u2 * u2 * u2) * t - 3, 2 * s1 + (a * a - 1) * s2 - 3,
          s1 - s2 - b1 * b2 * b3 * (a * a * a - 1) - 1};
}

double beta3_from(double alpha, double beta1, double beta2) {
  const double den = 1 - (beta1 + beta2) - beta1 * beta2 * (alpha * alpha * alpha - 1);
  return (1 - beta1) * (1 - beta2) / den;
}

ChatteringConstants solve_constants(const ConstantsOptions& opt) {
  if (!(opt.tol > 0)) fail(ErrorCode::InvalidArgument, "tolerance must be positive");

  auto accept = [&](const Vec3& z, ChatteringConstants& out) {
    const ChatteringConstants c = assemble(z);
    for (double r : constants_residuals(c))
      if (!(std::abs(r) <= opt.tol)) return false;
    out = c;
    return true;
  };
  auto feasible_box = [](const ChatteringConstants& c) {
    return c.alpha > 0 && c.alpha < 1 && c.beta1 > 0 && c.beta1 < c.beta2 && c.beta2 < 1 &&
           c.beta3 > 1 && c.tau1 > 0;
  };

  ChatteringConstants out;
  bool converged_outside = false;
  if (!opt.force_grid_fallback) {
    Vec3 z = opt.seed;
    if (newton(z)) {
      if (in_box(z) && accept(z, out) && feasible_box(out)) return out;
      converged_outside = !in_box(z);
    }
  }

  // Coarse scan for seeds, best residual first.
  const int n = 50;
  std::vector<std::pair<double, Vec3>> seeds;
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const Vec3 z{double(i) / n, double(j) / n, double(k) / n};
        const double r = norm_inf(reduced_residual(z));
        if (std::isfinite(r)) seeds.push_back({r, z});
      }
  std::partial_sort(seeds.begin(), seeds.begin() + std::min<size_t>(20, seeds.size()), seeds.end(),
                    [](const auto& a, const auto& b) { return a.first < b.first; });
  for (size_t s = 0; s < std::min<size_t>(20, seeds.size()); ++s) {
    Vec3 z = seeds[s].second;
    if (!newton(z)) continue;
    if (!in_box(z)) {
      converged_outside = true;
      continue;
    }
    if (accept(z, out) && feasible_box(out)) return out;
  }
  if (converged_outside)
    fail(ErrorCode::NotInFeasibleBox, "root found outside 0 < beta1 < beta2 < 1 < beta3");
  fail(ErrorCode::NoConvergence, "chattering constants did not converge to the requested tolerance");
}

ChatteringConstants solve_constants(double tol) {
  ConstantsOptions opt;
  opt.tol = tol;
  return solve_constants(opt);
}

double junction_time(const ChatteringConstants& c, int i) {
  return (1 - std::pow(c.alpha, i)) / (1 - c.alpha) * c.tau1;
}

PiecewiseControl build_cycle_control(const ChatteringConstants& c, int i) {
  if (i < 1) fail(ErrorCode::InvalidArgument, "cycle index must be >= 1");
  const double len = std::pow(c.alpha, i - 1) * c.tau1;
  return cycle_from(c.beta1, c.beta2, len, junction_time(c, i - 1));
}

int chattering_cycle_count(const ChatteringConstants& c, int n_cycles, double min_fraction) {
  if (n_cycles < 1) fail(ErrorCode::InvalidArgument, "n_cycles must be >= 1");
  int m = 0;
  double len = 1.0;
  while (m < n_cycles && len >= min_fraction) {
    ++m;
    len *= c.alpha;
  }
  return m;
}

PiecewiseControl build_chattering_schedule(const ChatteringConstants& c, int n_cycles,
                                           double min_fraction) {
  const int m = chattering_cycle_count(c, n_cycles, min_fraction);
  PiecewiseControl pc;
  double len = c.tau1;
  for (int i = 1; i <= m; ++i) {
    pc.append(cycle_from(c.beta1, c.beta2, len, 0.0));
    len *= c.alpha;
  }
  return pc;
}

CostateArc costates(const ChatteringConstants& c, double p0, int i) {
  if (!(p0 > 0)) fail(ErrorCode::InvalidArgument, "p0 must be positive");
  if (i < 1) fail(ErrorCode::InvalidArgument, "interval index must be >= 1");
  const auto betas = c.betas();
  auto roots_of = [&](int k) {
    const double a = junction_time(c, k - 1), b = junction_time(c, k);
    std::array<double, 3> r{};
    for (int j = 0; j < 3; ++j) r[j] = (1 - betas[j]) * a + betas[j] * b;
    return r;
  };
  CostateArc arc;
  arc.p0 = p0;
  arc.interval_index = i;
  arc.tau_start = junction_time(c, i - 1);
  arc.tau_end = junction_time(c, i);
  arc.roots = roots_of(i);
  // The tau^2 coefficient of -(p0/6) prod(tau - r) is (p0/6) sum(r); the jump
  // p_{1,i+1} - p_{1,i} = (mu/2)(tau - tau_i)^2 fixes mu from that difference.
  const auto next = roots_of(i + 1);
  double d = 0.0;
  for (int j = 0; j < 3; ++j) d += next[j] - arc.roots[j];
  arc.mu = p0 * d / 3.0;
  return arc;
}

AlphaFamilyPoint family_point(double alpha, double tol) {
  if (!(alpha >= 0 && alpha < 1)) fail(ErrorCode::InvalidArgument, "alpha must lie in [0, 1)");
  if (!(tol > 0)) fail(ErrorCode::InvalidArgument, "tolerance must be positive");
  auto g = [&](double b1) {
    const double b2 = beta2_from_beta1(b1);
    return (2 * b1 * b1 - 2 * b2 * b2 + 1) * (alpha - 1) - (4 * b1 - 4 * b2 + 2) * alpha;
  };
  const double lo = 1e-12, hi = 0.5;
  if (g(lo) * g(hi) > 0) fail(ErrorCode::NoConvergence, "no sign change in the family equation");
  AlphaFamilyPoint p;
  p.alpha = alpha;
  p.beta1 = bisect(g, lo, hi, 1e-16);
  p.beta2 = beta2_from_beta1(p.beta1);
  p.tau1 = (1 - alpha) / (1 + 2 * p.beta1 - 2 * p.beta2);
  if (!(p.tau1 > 0)) fail(ErrorCode::NoConvergence, "family point has non-positive tau1");

  const PiecewiseControl cyc = family_cycle(p);
  const StateVector e1{1.0, 0.0, 0.0};
  const StateVector end = propagate(e1, cyc);
  if (std::abs(end[0] - alpha) > 1e-9 || std::abs(end[1]) > 1e-9 || std::abs(end[2]) > 1e-9)
    fail(ErrorCode::NoConvergence, "family cycle misses alpha * e1");
  const auto ext = extents(sample(e1, cyc, cyc.duration()));
  if (ext[2].min < -1e-9) fail(ErrorCode::Infeasible, "y3 dips below zero within the cycle");
  p.j1 = integral_cost(e1, cyc, 3);
  p.j = p.j1 / (1 - std::pow(alpha, 4));
  (void)tol;
  return p;
}

PiecewiseControl family_cycle(const AlphaFamilyPoint& p) {
  return cycle_from(p.beta1, p.beta2, p.tau1, 0.0);
}

std::vector<AlphaFamilyPoint> alpha_sweep(double from, double to, double step, double tol) {
  if (!(step > 0)) fail(ErrorCode::InvalidArgument, "step must be positive");
  if (!(from >= 0 && to < 1 && from <= to)) fail(ErrorCode::InvalidArgument, "sweep range must lie in [0, 1)");
  std::vector<AlphaFamilyPoint> out;
  const auto n = static_cast<long long>(std::floor((to - from) / step + 1e-9));
  for (long long i = 0; i <= n; ++i) out.push_back(family_point(from + static_cast<double>(i) * step, tol));
  return out;
}

void write_sweep_csv(std::ostream& os, const std::vector<AlphaFamilyPoint>& pts) {
  os << "alpha,tau1,beta1,beta2,j1,j\n";
  char buf[256];
  for (const auto& p : pts) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", p.alpha, p.tau1,
                  p.beta1, p.beta2, p.j1, p.j);
    os << buf;
  }
}

double homogeneity_check(const ChatteringConstants& c, double a, const std::vector<double>& grid,
                         int n_cycles) {
  if (!(a > 0)) fail(ErrorCode::InvalidArgument, "scale must be positive");
  const PiecewiseControl base = build_chattering_schedule(c, n_cycles);
  PiecewiseControl scaled;
  for (const auto& s : base.segments) scaled.add(a * s.duration, s.level);
  const StateVector e1{1.0, 0.0, 0.0}, ae1{a, 0.0, 0.0};
  double worst = 0.0;
  for (double tau : grid) {
    const StateVector ya = state_at(ae1, scaled, tau);
    const StateVector y1 = state_at(e1, base, tau / a);
    double ak = 1.0;
    for (int k = 0; k < 3; ++k) {
      ak *= a;
      worst = std::max(worst, std::abs(ya[k] - ak * y1[k]));
    }
  }
  return worst;
}

OneSwitchReport check_infeasible_one_switch(double exclusion) {
  // Both systems are written with sigma = (second arc)/(total) and each row
  // divided by its natural power of T, so the trivial T -> 0 limit is not a root.
  auto direct = [](double T, double s, double v) {
    const double r1 = 1 + v * T * (1 - 2 * s);
    const double r2 = 1 + v * T * (1 - 2 * s * s) / 2;
    const double r3 = 0.5 + v * T * (1 - 2 * s * s * s) / 6;
    return std::sqrt(r1 * r1 + r2 * r2 + r3 * r3);
  };
  const double amax = 1 - exclusion;
  auto cycle = [amax](double T, double s, double v, double* alpha_out) {
    const double free_alpha = 1 + v * T * (1 - 2 * s);
    const double alpha = std::clamp(free_alpha, 0.0, amax);
    if (alpha_out) *alpha_out = alpha;
    const double r1 = free_alpha - alpha;
    const double r2 = 1 + v * T * (1 - 2 * s * s) / 2;
    const double r3 = 0.5 + v * T * (1 - 2 * s * s * s) / 6;
    return std::sqrt(r1 * r1 + r2 * r2 + r3 * r3);
  };

  struct Best {
    double r = std::numeric_limits<double>::infinity();
    double lt = 0, s = 0, v = 1;
  };
  auto scan = [](const auto& f) {
    Best b;
    const int nt = 600, ns = 401;
    for (double v : {-1.0, 1.0})
      for (int i = 0; i < nt; ++i) {
        const double lt = -3.0 + 6.0 * i / (nt - 1);  // log10 T in [-3, 3]
        for (int j = 0; j < ns; ++j) {
          const double s = double(j) / (ns - 1);
          const double r = f(std::pow(10.0, lt), s, v);
          if (r < b.r) b = {r, lt, s, v};
        }
      }
    // Pattern search refinement in (log10 T, sigma).
    double step_t = 6.0 / 599, step_s = 1.0 / 400;
    while (step_t > 1e-12) {
      bool improved = false;
      for (auto [dt, ds] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
        const double lt = std::clamp(b.lt + dt * step_t, -3.0, 3.0);
        const double s = std::clamp(b.s + ds * step_s, 0.0, 1.0);
        const double r = f(std::pow(10.0, lt), s, b.v);
        if (r < b.r) {
          b = {r, lt, s, b.v};
          improved = true;
        }
      }
      if (!improved) {
        step_t *= 0.5;
        step_s *= 0.5;
      }
    }
    return b;
  };

  OneSwitchReport rep;
  rep.exclusion = exclusion;
  const Best d = scan(direct);
  rep.direct_min_residual = d.r;
  rep.direct_argmin = {std::pow(10.0, d.lt), d.s, d.v};
  const Best c = scan([&](double T, double s, double v) { return cycle(T, s, v, nullptr); });
  double alpha = 0;
  cycle(std::pow(10.0, c.lt), c.s, c.v, &alpha);
  rep.cycle_min_residual = c.r;
  rep.cycle_argmin = {std::pow(10.0, c.lt), c.s, c.v, alpha};
  const double r1 = 1 + (-1.0) * 4.0 * (1 - 2 * 0.5) - 1.0;
  const double r2 = 1 + (-1.0) * 4.0 * (1 - 2 * 0.25) / 2;
  const double r3 = 0.5 + (-1.0) * 4.0 * (1 - 2 * 0.125) / 6;
  rep.cycle_degenerate_residual = std::sqrt(r1 * r1 + r2 * r2 + r3 * r3);
  return rep;
}

}  // namespace citopt
