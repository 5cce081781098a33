#include "citopt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "citopt/error.hpp"

namespace citopt::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Y = std::array<double, 3>;

Y step(const Y& y, double T, double v) {
  return {y[0] + v * T, y[1] + y[0] * T + v * T * T / 2,
          y[2] + y[1] * T + y[0] * T * T / 2 + v * T * T * T / 6};
}

struct Cycle {
  Y end{};
  double integral = 0.0;
  double min_y3 = kInf;
};

// (-1, +1, -1) with switch fractions b1, b2 of length T from e1.
Cycle run_cycle(double T, double b1, double b2, int probes = 0) {
  const double d[3] = {b1 * T, (b2 - b1) * T, (1 - b2) * T};
  const double v[3] = {-1, 1, -1};
  Cycle c;
  Y y{1, 0, 0};
  for (int k = 0; k < 3; ++k) {
    const Y mid = step(y, d[k] / 2, v[k]);
    const Y end = step(y, d[k], v[k]);
    c.integral += d[k] / 6 * (y[2] + 4 * mid[2] + end[2]);
    for (int p = 0; p <= probes; ++p) c.min_y3 = std::min(c.min_y3, step(y, d[k] * p / std::max(probes, 1), v[k])[2]);
    y = end;
  }
  c.end = y;
  return c;
}

double ternary_min(const std::function<double(double)>& f, double a, double b, double xtol, double& fx) {
  while (b - a > xtol) {
    const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
    if (f(m1) < f(m2)) b = m2;
    else a = m1;
  }
  const double x = 0.5 * (a + b);
  fx = f(x);
  return x;
}

double norm(std::initializer_list<double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

struct Axis {
  double lo, hi;
  bool log = false;
  double at(int i, int n) const {
    const double u = lo + (hi - lo) * i / (n - 1);
    return log ? std::pow(10.0, u) : u;
  }
};

using Fn = std::function<double(const std::vector<double>&)>;

// Hooke-Jeeves pattern search in axis coordinates (log10 for log axes).
std::vector<double> pattern_search(const Fn& f, std::vector<double> p, const std::vector<Axis>& ax, double& fp) {
  const size_t d = p.size();
  std::vector<double> h(d);
  for (size_t k = 0; k < d; ++k) h[k] = (ax[k].hi - ax[k].lo) / 50;
  auto eval = [&](const std::vector<double>& q) {
    std::vector<double> x(d);
    for (size_t k = 0; k < d; ++k) x[k] = ax[k].log ? std::pow(10.0, q[k]) : q[k];
    return f(x);
  };
  auto clamp_to_box = [&](std::vector<double>& q) {
    for (size_t k = 0; k < d; ++k) q[k] = std::clamp(q[k], ax[k].lo, ax[k].hi);
  };
  auto explore = [&](std::vector<double> q, double& fq) {
    for (size_t k = 0; k < d; ++k)
      for (double s : {1.0, -1.0}) {
        auto r = q;
        r[k] += s * h[k];
        clamp_to_box(r);
        const double fr = eval(r);
        if (fr < fq) {
          q = r;
          fq = fr;
          break;
        }
      }
    return q;
  };
  fp = eval(p);
  for (int it = 0; it < 200000; ++it) {
    double fn = fp;
    auto q = explore(p, fn);
    if (fn < fp) {
      // Keep stepping along the improving direction while it pays off.
      for (;;) {
        std::vector<double> pat(d);
        for (size_t k = 0; k < d; ++k) pat[k] = 2 * q[k] - p[k];
        clamp_to_box(pat);
        p = q;
        fp = fn;
        double fpat = eval(pat);
        auto r = explore(pat, fpat);
        if (fpat < fp) {
          q = r;
          fn = fpat;
        } else {
          break;
        }
      }
      continue;
    }
    double hmax = 0;
    for (size_t k = 0; k < d; ++k) hmax = std::max(hmax, h[k] /= 2);
    if (hmax < 1e-15) break;
  }
  return p;
}

Landscape scan(System sys, const Fn& f, const std::vector<Axis>& ax, int n, double root_tol) {
  const size_t d = ax.size();
  size_t total = 1;
  for (size_t k = 0; k < d; ++k) total *= static_cast<size_t>(n);
  std::vector<double> val(total);
  std::vector<int> idx(d);
  std::vector<double> x(d);
  for (size_t c = 0; c < total; ++c) {
    size_t r = c;
    for (size_t k = 0; k < d; ++k) {
      idx[k] = static_cast<int>(r % n);
      r /= n;
      x[k] = ax[k].at(idx[k], n);
    }
    const double v = f(x);
    val[c] = std::isfinite(v) ? v : kInf;
  }
  // Grid cells no larger than any neighbour.
  std::vector<std::pair<double, size_t>> minima;
  for (size_t c = 0; c < total; ++c) {
    if (!std::isfinite(val[c])) continue;
    size_t r = c;
    for (size_t k = 0; k < d; ++k) {
      idx[k] = static_cast<int>(r % n);
      r /= n;
    }
    bool is_min = true;
    size_t nb = 1;
    for (size_t k = 0; k < d; ++k) nb *= 3;
    for (size_t m = 0; m < nb && is_min; ++m) {
      size_t mm = m, cc = 0, stride = 1;
      bool inside = true, self = true;
      for (size_t k = 0; k < d; ++k) {
        const int off = static_cast<int>(mm % 3) - 1;
        mm /= 3;
        if (off != 0) self = false;
        const int j = idx[k] + off;
        if (j < 0 || j >= n) inside = false;
        cc += static_cast<size_t>(j) * stride;
        stride *= static_cast<size_t>(n);
      }
      if (!inside || self) continue;
      if (val[cc] < val[c]) is_min = false;
    }
    if (is_min) minima.push_back({val[c], c});
  }
  std::sort(minima.begin(), minima.end());
  if (minima.size() > 40) minima.resize(40);

  Landscape L;
  L.system = sys;
  L.min_residual = kInf;
  for (const auto& [v0, c] : minima) {
    std::vector<double> p(d);
    size_t r = c;
    for (size_t k = 0; k < d; ++k) {
      const int i = static_cast<int>(r % n);
      r /= n;
      p[k] = ax[k].lo + (ax[k].hi - ax[k].lo) * i / (n - 1);
    }
    double fp = 0;
    p = pattern_search(f, p, ax, fp);
    for (size_t k = 0; k < d; ++k)
      if (ax[k].log) p[k] = std::pow(10.0, p[k]);
    if (fp < L.min_residual) {
      L.min_residual = fp;
      L.argmin = p;
    }
    if (fp > root_tol) continue;
    bool seen = false;
    for (const auto& q : L.roots) {
      double dist = 0;
      for (size_t k = 0; k < d; ++k) dist = std::max(dist, std::abs(q[k] - p[k]) / std::max(1.0, std::abs(q[k])));
      if (dist < 1e-5) seen = true;
    }
    if (!seen) L.roots.push_back(p);
  }
  L.basins = static_cast<int>(L.roots.size());
  return L;
}

}  // namespace

FamilyValue family_value(double alpha) {
  FamilyValue out;
  out.alpha = alpha;
  auto tau_of = [&](double b1, double b2) { return (1 - alpha) / (1 + 2 * b1 - 2 * b2); };
  auto res = [&](double b1, double b2) -> std::array<double, 2> {
    const double T = tau_of(b1, b2);
    const Cycle c = run_cycle(T, b1, b2);
    return {c.end[1] / T, c.end[2] / (T * T)};
  };
  std::vector<std::pair<double, std::array<double, 2>>> seeds;
  const int n = 40;
  for (int i = 1; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double b1 = double(i) / n, b2 = double(j) / n;
      if (!(tau_of(b1, b2) > 0)) continue;
      const auto r = res(b1, b2);
      seeds.push_back({std::hypot(r[0], r[1]), {b1, b2}});
    }
  std::sort(seeds.begin(), seeds.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  double best_j = kInf;
  for (size_t s = 0; s < std::min<size_t>(12, seeds.size()); ++s) {
    double b1 = seeds[s].second[0], b2 = seeds[s].second[1];
    bool ok = false;
    for (int it = 0; it < 60; ++it) {
      const auto r = res(b1, b2);
      if (std::hypot(r[0], r[1]) < 1e-14) {
        ok = true;
        break;
      }
      const double h = 1e-7;
      const auto r1 = res(b1 + h, b2), r2 = res(b1, b2 + h);
      const double a11 = (r1[0] - r[0]) / h, a21 = (r1[1] - r[1]) / h;
      const double a12 = (r2[0] - r[0]) / h, a22 = (r2[1] - r[1]) / h;
      const double det = a11 * a22 - a12 * a21;
      if (std::abs(det) < 1e-300) break;
      b1 -= (a22 * r[0] - a12 * r[1]) / det;
      b2 -= (-a21 * r[0] + a11 * r[1]) / det;
      if (!(b1 > 0 && b2 > b1 && b2 < 1)) break;
    }
    if (!ok) {
      const auto r = res(b1, b2);
      ok = std::hypot(r[0], r[1]) < 1e-11;
    }
    if (!ok || !(b1 > 0 && b2 > b1 && b2 < 1)) continue;
    const double T = tau_of(b1, b2);
    if (!(T > 0)) continue;
    const Cycle c = run_cycle(T, b1, b2, 400);
    if (c.min_y3 < -1e-9) continue;
    const double j = c.integral / (1 - std::pow(alpha, 4));
    if (j < best_j) {
      best_j = j;
      out = {alpha, T, b1, b2, j, true};
    }
  }
  return out;
}

GridOptimum alpha_grid_optimum(const std::vector<double>& grid, double tol) {
  GridOptimum g;
  if (grid.size() < 3) fail(ErrorCode::InvalidArgument, "grid needs at least three points");
  size_t best = 0;
  for (size_t i = 0; i < grid.size(); ++i) {
    g.grid.push_back(family_value(grid[i]));
    if (g.grid[i].ok && (!g.grid[best].ok || g.grid[i].j < g.grid[best].j)) best = i;
  }
  const double lo = grid[best == 0 ? 0 : best - 1];
  const double hi = grid[std::min(best + 1, grid.size() - 1)];
  double fx = 0;
  const double x = ternary_min(
      [](double a) {
        const auto v = family_value(a);
        return v.ok ? v.j : kInf;
      },
      lo, hi, std::max(tol, 1e-11), fx);
  g.alpha = x;
  g.j = fx;
  return g;
}

StateVector rk4_reference(const StateVector& x0, const PiecewiseControl& pc, double dt) {
  if (!(dt > 0)) fail(ErrorCode::InvalidArgument, "dt must be positive");
  const size_t n = x0.size();
  StateVector x = x0;
  for (const auto& s : pc.segments) {
    const long steps = std::max(1L, static_cast<long>(std::ceil(s.duration / dt)));
    const double h = s.duration / static_cast<double>(steps);
    auto f = [&](const StateVector& y) {
      StateVector d(n);
      d[0] = s.level;
      for (size_t k = 1; k < n; ++k) d[k] = y[k - 1];
      return d;
    };
    for (long i = 0; i < steps; ++i) {
      StateVector t(n);
      const auto k1 = f(x);
      for (size_t k = 0; k < n; ++k) t[k] = x[k] + h / 2 * k1[k];
      const auto k2 = f(t);
      for (size_t k = 0; k < n; ++k) t[k] = x[k] + h / 2 * k2[k];
      const auto k3 = f(t);
      for (size_t k = 0; k < n; ++k) t[k] = x[k] + h * k3[k];
      const auto k4 = f(t);
      for (size_t k = 0; k < n; ++k) x[k] += h / 6 * (k1[k] + 2 * k2[k] + 2 * k3[k] + k4[k]);
    }
  }
  return x;
}

const char* to_string(System s) {
  switch (s) {
    case System::Constants: return "constants";
    case System::SingleArc: return "single_arc";
    case System::OneSwitchCycle: return "one_switch_cycle";
    case System::AlphaFamily: return "alpha_family";
    case System::SurfacePair: return "surface_pair";
  }
  return "?";
}

Landscape residual_landscape(System sys, const LandscapeOptions& opt) {
  const int n = opt.resolution;
  if (n < 3) fail(ErrorCode::InvalidArgument, "resolution must be at least 3");
  auto axes = [&](std::vector<Axis> def) {
    for (size_t k = 0; k < opt.box.size() && k < def.size(); ++k) {
      def[k].lo = opt.box[k].first;
      def[k].hi = opt.box[k].second;
    }
    return def;
  };
  const auto& c = opt.constants;

  switch (sys) {
    case System::Constants: {
      // (alpha, beta1, beta2); tau1 and beta3 eliminated through the two linear equations.
      Fn f = [](const std::vector<double>& p) {
        const double a = p[0], b1 = p[1], b2 = p[2];
        if (!(b1 < b2)) return kInf;
        const double t = (1 - a) / (1 + 2 * b1 - 2 * b2);
        const double b3 = (1 - b1) * (1 - b2) / (1 - b1 - b2 - b1 * b2 * (a * a * a - 1));
        if (!(t > 0) || !(b3 > 1)) return kInf;
        const double u1 = 1 - b1, u2 = 1 - b2;
        const double s1 = b1 + b2 + b3, s2 = b1 * b2 + b1 * b3 + b2 * b3;
        return norm({(1 - 2 * u1 * u1 + 2 * u2 * u2) * t - 2, (1 - 2 * u1 * u1 * u1 + 2 * u2 * u2 * u2) * t - 3,
                     2 * s1 + (a * a - 1) * s2 - 3});
      };
      return scan(sys, f, axes({{1e-3, 0.999}, {1e-3, 0.999}, {1e-3, 0.999}}), n, 1e-9);
    }
    case System::AlphaFamily: {
      const double alpha = c.alpha;
      Fn f = [alpha](const std::vector<double>& p) {
        const double T = p[0], b1 = p[1], b2 = p[2];
        if (!(b1 < b2)) return kInf;
        const Cycle cy = run_cycle(T, b1, b2);
        return norm({cy.end[0] - alpha, cy.end[1] / T, cy.end[2] / (T * T)});
      };
      return scan(sys, f, axes({{0.1, 10.0}, {1e-3, 0.999}, {1e-3, 0.999}}), n, 1e-9);
    }
    case System::SurfacePair: {
      const double bt[3] = {c.beta1 * c.tau1, c.beta2 * c.tau1, c.beta3 * c.tau1};
      Fn f = [bt](const std::vector<double>& p) {
        const double t1 = p[0], t2 = p[1];
        if (!(t2 < t1)) return kInf;
        double f1 = t1, f2 = t2;
        for (double b : bt) {
          f1 *= 1 + b / t1;
          f2 *= 1 + b / t2;
        }
        const double y3 = t1 * t1 * t2 - t1 * t2 * t2 + t1 * t1 / 2 - t1 * t1 * t1 / 6 + t2 * t2 * t2 / 3;
        return norm({(f1 - f2) / f1, y3 / std::max(1.0, t1 * t1 * t1)});
      };
      return scan(sys, f, axes({{0.1, 40.0}, {0.1, 40.0}}), n, 1e-9);
    }
    case System::SingleArc:
    case System::OneSwitchCycle: {
      // One switch: v0 for (1 - sigma) T then -v0 for sigma T; row k divided by T^(k-1).
      const bool cyc = sys == System::OneSwitchCycle;
      Landscape best;
      best.min_residual = kInf;
      for (double v0 : {-1.0, 1.0}) {
        Fn f = [v0, cyc](const std::vector<double>& p) {
          const double T = p[0], s = p[1], a = cyc ? p[2] : 0.0;
          Y y = step({1, 0, 0}, (1 - s) * T, v0);
          y = step(y, s * T, -v0);
          return norm({y[0] - a, y[1] / T, y[2] / (T * T)});
        };
        std::vector<Axis> ax = {{-3.0, 3.0, true}, {0.0, 1.0}};
        if (cyc) ax.push_back({0.0, 1 - opt.exclusion});
        for (size_t k = 0; k < opt.box.size() && k < ax.size(); ++k) {
          ax[k].lo = opt.box[k].first;
          ax[k].hi = opt.box[k].second;
        }
        const int res = cyc ? std::max(3, n / 2) : n;
        Landscape L = scan(sys, f, ax, res, 1e-9);
        if (L.min_residual < best.min_residual) {
          L.argmin.push_back(v0);
          L.basins += best.basins;
          best = L;
        } else {
          best.basins += L.basins;
        }
      }
      return best;
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown system");
}

}  // namespace citopt::oracle
