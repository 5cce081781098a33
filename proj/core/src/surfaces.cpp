#include "citopt/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>

#include "citopt/chattering.hpp"
#include "citopt/dynamics.hpp"
#include "citopt/error.hpp"
#include "citopt/poly.hpp"

namespace citopt {

namespace {

Vec3 gamma_plus(double a, double t1, double t2) {
  return {a * (1 - t1 + 2 * t2),
          a * a * (-t1 - 2 * t1 * t2 + t1 * t1 / 2 + t2 * t2),
          a * a * a *
              (t1 * t1 * t2 - t1 * t2 * t2 + t1 * t1 / 2 - t1 * t1 * t1 / 6 + t2 * t2 * t2 / 3)};
}

Vec3 gamma_minus(double a, double t) {
  return {a * (1 + t), a * a * (-t - t * t / 2), a * a * a * (t * t / 2 + t * t * t / 6)};
}

Vec3 gamma_f(double a, double t) {
  return {a * (1 - t), a * a * (-t + t * t / 2), a * a * a * (t * t / 2 - t * t * t / 6)};
}

// Minimum of y3 along one constant-control arc of length s from y.
double arc_min_y3(const Vec3& y, double v, double s) {
  const StateVector x{y[0], y[1], y[2]};
  const auto c = segment_polynomial(x, v, 3);
  double m = std::min(y[2], poly_eval(c, s));
  for (double r : real_roots(poly_derivative(c), 0.0, s)) m = std::min(m, poly_eval(c, r));
  return m;
}

Vec3 advance(const Vec3& y, double v, double s) {
  const auto x = propagate_segment({y[0], y[1], y[2]}, s, v);
  return {x[0], x[1], x[2]};
}

}  // namespace

const char* to_string(SurfaceKind s) {
  switch (s) {
    case SurfaceKind::GammaPlus: return "GammaPlus";
    case SurfaceKind::GammaMinus: return "GammaMinus";
    case SurfaceKind::GammaF: return "GammaF";
  }
  return "?";
}

const char* to_string(RegionLabel r) {
  switch (r) {
    case RegionLabel::OmegaMinus: return "OmegaMinus";
    case RegionLabel::OmegaPlus: return "OmegaPlus";
    case RegionLabel::OmegaInfeasible: return "OmegaInfeasible";
    case RegionLabel::OnGammaPlus: return "OnGammaPlus";
    case RegionLabel::OnGammaMinus: return "OnGammaMinus";
    case RegionLabel::OnGammaF: return "OnGammaF";
    case RegionLabel::NoChatterCurve: return "NoChatterCurve";
  }
  return "?";
}

SurfaceConstants surface_constants(const ChatteringConstants& c, double tol) {
  if (!(tol > 0)) fail(ErrorCode::InvalidArgument, "tolerance must be positive");
  const auto b = c.betas();
  // d/dr log f = sum 1/(r + b_k tau1) - 2/r, negative near 0 and positive for large r.
  auto dlog = [&](double r) {
    double s = -2.0 / r;
    for (double bk : b) s += 1.0 / (r + bk * c.tau1);
    return s;
  };
  if (!(dlog(1e-3) < 0 && dlog(1e3) > 0)) fail(ErrorCode::NoConvergence, "no critical point of f");
  SurfaceConstants k;
  k.r_star = bisect(dlog, 1e-3, 1e3, 1e-16);

  auto f = [&](double r) {
    double p = r;
    for (double bk : b) p *= 1 + bk * c.tau1 / r;
    return p;
  };
  auto partner = [&](double t1) {
    const double target = f(t1);
    return bisect([&](double t) { return f(t) - target; }, 1e-9, k.r_star, 1e-16);
  };
  auto y3 = [&](double t1) { return gamma_plus(1.0, t1, partner(t1))[2]; };
  const double hi = 1e3;
  if (!(y3(k.r_star) > 0 && y3(hi) < 0)) fail(ErrorCode::NoConvergence, "no end point of the surface");
  k.t1_star = bisect(y3, k.r_star, hi, 1e-16);
  k.t2_star = partner(k.t1_star);
  if (std::abs(f(k.t1_star) - f(k.t2_star)) > std::max(tol, 1e-9) * f(k.t1_star))
    fail(ErrorCode::NoConvergence, "coupling residual above tolerance");
  return k;
}

SwitchingSurfaces::SwitchingSurfaces(const ChatteringConstants& c, double tol)
    : c_(c), k_(surface_constants(c, tol)) {}

double SwitchingSurfaces::coupling(double r) const {
  double p = r;
  for (double bk : c_.betas()) p *= 1 + bk * c_.tau1 / r;
  return p;
}

double SwitchingSurfaces::partner(double t1) const {
  if (t1 <= k_.r_star) return t1;
  const double target = coupling(t1);
  return bisect([&](double t) { return coupling(t) - target; }, 1e-9, k_.r_star, 1e-16);
}

Vec3 SwitchingSurfaces::eval(SurfaceKind s, double a, double t1, double t2) const {
  const double slack = 1e-9;
  if (!(a >= 0)) fail(ErrorCode::ParamOutOfRange, "scale must be non-negative");
  switch (s) {
    case SurfaceKind::GammaPlus: {
      if (t2 < k_.t2_star - slack || t2 > k_.r_star + slack || t1 < k_.r_star - slack ||
          t1 > k_.t1_star + slack)
        fail(ErrorCode::ParamOutOfRange, "GammaPlus needs t2* <= t2 <= r* <= t1 <= t1*");
      const double f1 = coupling(t1), f2 = coupling(t2);
      if (std::abs(f1 - f2) > 1e-8 * f1)
        fail(ErrorCode::ParamOutOfRange, "GammaPlus parameters violate f(t1) = f(t2)");
      return gamma_plus(a, t1, t2);
    }
    case SurfaceKind::GammaMinus:
      if (t1 < -slack || t1 > k_.r_star + slack)
        fail(ErrorCode::ParamOutOfRange, "GammaMinus needs 0 <= t <= r*");
      return gamma_minus(a, t1);
    case SurfaceKind::GammaF:
      if (t1 < -slack || t1 > 3 + slack) fail(ErrorCode::ParamOutOfRange, "GammaF needs 0 <= t <= 3");
      return gamma_f(a, t1);
  }
  fail(ErrorCode::InvalidArgument, "unknown surface");
}

SurfacePoint SwitchingSurfaces::point(SurfaceKind s, double a, double t1, double t2) const {
  SurfacePoint p;
  p.surface = s;
  p.a = a;
  p.params = {t1, s == SurfaceKind::GammaPlus ? t2 : 0.0};
  p.y = eval(s, a, t1, t2);
  return p;
}

SwitchingSurfaces::Sheet SwitchingSurfaces::sheet_point(double theta) const {
  if (theta <= k_.r_star) return {SurfaceKind::GammaMinus, theta, gamma_minus(1.0, theta)};
  return {SurfaceKind::GammaPlus, theta, gamma_plus(1.0, theta, partner(theta))};
}

RegionLabel SwitchingSurfaces::classify(const Vec3& y, double tol) const {
  if (y[2] < -tol) fail(ErrorCode::NegativeY3, "y3 must be non-negative");
  const double y1 = y[0], y2 = y[1], y3 = std::max(y[2], 0.0);

  const double t = y1;
  const double sc = std::max(1.0, std::abs(t));
  if (t >= -tol && std::abs(y2 + t * t / 2) <= tol * sc * sc &&
      std::abs(y3 - t * t * t / 6) <= tol * sc * sc * sc)
    return RegionLabel::NoChatterCurve;

  double sheet_y1 = 0.0, f_y1 = 0.0;
  SurfaceKind sheet_kind = SurfaceKind::GammaPlus;
  if (y3 <= tol * std::max(1.0, std::pow(std::abs(y2), 1.5))) {
    if (std::abs(y2) <= tol * std::max(1.0, y1 * y1))
      return y1 > 0 ? RegionLabel::OmegaMinus : RegionLabel::OmegaInfeasible;
    if (y2 < 0) return RegionLabel::OmegaInfeasible;
    const Vec3 cs = gamma_plus(1.0, k_.t1_star, k_.t2_star);
    sheet_y1 = std::sqrt(y2 / cs[1]) * cs[0];
    f_y1 = std::sqrt(y2 / 1.5) * -2.0;
  } else {
    // y2 / y3^(2/3) is increasing along both parameterized sheets.
    const double w = y2 / std::pow(std::cbrt(y3), 2);
    auto shape = [&](const Vec3& c) { return c[1] - w * std::pow(std::cbrt(c[2]), 2); };
    const double th = bisect([&](double q) { return shape(sheet_point(q).c); }, 1e-30,
                             k_.t1_star, 1e-16);
    const Sheet sp = sheet_point(th);
    sheet_kind = sp.kind;
    sheet_y1 = std::cbrt(y3 / sp.c[2]) * sp.c[0];
    const double tf = bisect([&](double q) { return shape(gamma_f(1.0, q)); }, 1e-30, 3.0, 1e-16);
    const Vec3 cf = gamma_f(1.0, tf);
    f_y1 = std::cbrt(y3 / cf[2]) * cf[0];
  }
  const double ytol = tol * std::max(1.0, std::abs(y1));
  if (std::abs(y1 - sheet_y1) <= ytol)
    return sheet_kind == SurfaceKind::GammaPlus ? RegionLabel::OnGammaPlus : RegionLabel::OnGammaMinus;
  if (y1 > sheet_y1) return RegionLabel::OmegaMinus;
  if (std::abs(y1 - f_y1) <= ytol) return RegionLabel::OnGammaF;
  if (y1 < f_y1) return RegionLabel::OmegaInfeasible;
  return RegionLabel::OmegaPlus;
}

Approach SwitchingSurfaces::synthesize_approach(const Vec3& y0, double tol) const {
  const RegionLabel label = classify(y0, 1e-9);
  if (label == RegionLabel::NoChatterCurve)
    fail(ErrorCode::OnNoChatterCurve, "initial state reaches the origin without chattering");
  if (label == RegionLabel::OmegaInfeasible) fail(ErrorCode::Infeasible, "no control keeps y3 >= 0");

  const double scale = std::max({1.0, std::abs(y0[0]), std::sqrt(std::abs(y0[1])), std::cbrt(y0[2])});
  const double stol = tol * scale;

  struct Candidate {
    double s0, theta, a;
  };
  // Residual in y3 at the switch, given the first arc length fixed by the
  // conserved quantity y2 -/+ y1^2/2 of the first arc.
  auto two_switch = [&](double th) -> std::optional<Candidate> {
    const Vec3 c = gamma_plus(1.0, th, partner(th));
    const double K = c[1] + c[0] * c[0] / 2, num = y0[1] + y0[0] * y0[0] / 2;
    if (!(num / K > 0)) return std::nullopt;
    const double a = std::sqrt(num / K);
    return Candidate{y0[0] - a * c[0], th, a};
  };
  auto one_switch = [&](double t) -> std::optional<Candidate> {
    const Vec3 c = gamma_minus(1.0, t);
    const double D = 0.5 + 2 * t + t * t, num = y0[0] * y0[0] / 2 - y0[1];
    if (num < 0) return std::nullopt;
    const double a = std::sqrt(num / D);
    return Candidate{a * c[0] - y0[0], t, a};
  };

  const bool minus_side = label == RegionLabel::OmegaMinus || label == RegionLabel::OnGammaPlus;
  const double v_first = minus_side ? -1.0 : 1.0;
  auto make = [&](double th) { return minus_side ? two_switch(th) : one_switch(th); };
  auto residual = [&](const Candidate& cd) {
    const Vec3 ys = advance(y0, v_first, cd.s0);
    const Vec3 c = minus_side ? gamma_plus(1.0, cd.theta, partner(cd.theta)) : gamma_minus(1.0, cd.theta);
    return ys[2] - cd.a * cd.a * cd.a * c[2];
  };

  const double lo = minus_side ? k_.r_star : 0.0, hi = minus_side ? k_.t1_star : k_.r_star;
  const int n = 2000;
  std::vector<Candidate> roots;
  std::optional<Candidate> prev;
  double prev_r = 0.0, prev_th = lo;
  for (int i = 0; i <= n; ++i) {
    const double th = lo + (hi - lo) * i / n;
    const auto cd = make(th);
    if (!cd) {
      prev.reset();
      continue;
    }
    const double r = residual(*cd);
    if (r == 0.0) roots.push_back(*cd);
    if (prev && prev_r * r < 0) {
      const double root = bisect(
          [&](double q) {
            const auto c2 = make(q);
            return c2 ? residual(*c2) : std::numeric_limits<double>::quiet_NaN();
          },
          prev_th, th, 1e-16);
      if (const auto c2 = make(root)) roots.push_back(*c2);
    }
    prev = cd;
    prev_r = r;
    prev_th = th;
  }

  // The first arc may run backwards while scanning; only forward roots count.
  std::vector<Candidate> valid;
  for (auto cd : roots)
    if (cd.a > 0 && cd.s0 >= -stol) valid.push_back({std::max(cd.s0, 0.0), cd.theta, cd.a});
  std::sort(valid.begin(), valid.end(), [](const Candidate& a, const Candidate& b) { return a.s0 < b.s0; });
  for (const auto& cd : valid) {
    if (arc_min_y3(y0, v_first, cd.s0) < -1e-9 * scale * scale * scale) continue;
    Approach ap;
    ap.a = cd.a;
    ap.control.add(cd.s0, v_first);
    Vec3 ys = advance(y0, v_first, cd.s0);
    if (minus_side) {
      const double t2 = partner(cd.theta);
      // Starting on Gamma-plus leaves no first arc and no switch to record.
      if (cd.s0 > 0) ap.switches.push_back({SurfaceKind::GammaPlus, cd.a, {cd.theta, t2}, ys});
      ap.control.add(cd.a * (cd.theta - t2), 1.0);
      ys = advance(ys, 1.0, cd.a * (cd.theta - t2));
      ap.switches.push_back({SurfaceKind::GammaMinus, cd.a, {t2, 0.0}, ys});
      ap.control.add(cd.a * t2, -1.0);
    } else {
      ap.switches.push_back({SurfaceKind::GammaMinus, cd.a, {cd.theta, 0.0}, ys});
      ap.control.add(cd.a * cd.theta, -1.0);
    }
    const auto end = propagate({y0[0], y0[1], y0[2]}, ap.control);
    const double e = 1e-9 * scale;
    if (std::abs(end[0] - cd.a) > e * 10 || std::abs(end[1]) > e * scale ||
        std::abs(end[2]) > e * scale * scale)
      continue;
    const auto ext = extents(sample({y0[0], y0[1], y0[2]}, ap.control, ap.control.duration() + 1.0));
    if (ext[2].min < -1e-9 * scale * scale * scale) continue;
    return ap;
  }
  fail(ErrorCode::NoConvergence, "no admissible switch sequence found");
}

void SwitchingSurfaces::write_csv(std::ostream& os, int n_a, int n_t, double a_max) const {
  if (n_a < 1 || n_t < 2) fail(ErrorCode::InvalidArgument, "mesh needs n_a >= 1 and n_t >= 2");
  os << "surface,a,t1,t2,y1,y2,y3\n";
  char buf[320];
  auto row = [&](SurfaceKind s, double a, double t1, double t2, const Vec3& y) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", to_string(s), a, t1,
                  t2, y[0], y[1], y[2]);
    os << buf;
  };
  for (int i = 1; i <= n_a; ++i) {
    const double a = a_max * i / n_a;
    for (int j = 0; j < n_t; ++j) {
      const double t1 = k_.r_star + (k_.t1_star - k_.r_star) * j / (n_t - 1);
      const double t2 = partner(t1);
      row(SurfaceKind::GammaPlus, a, t1, t2, gamma_plus(a, t1, t2));
    }
    for (int j = 0; j < n_t; ++j) {
      const double t = k_.r_star * j / (n_t - 1);
      row(SurfaceKind::GammaMinus, a, t, 0.0, gamma_minus(a, t));
    }
    for (int j = 0; j < n_t; ++j) {
      const double t = 3.0 * j / (n_t - 1);
      row(SurfaceKind::GammaF, a, t, 0.0, gamma_f(a, t));
    }
  }
}

}  // namespace citopt
