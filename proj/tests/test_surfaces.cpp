#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "citopt/chattering.hpp"
#include "citopt/dynamics.hpp"
#include "citopt/error.hpp"
#include "citopt/surfaces.hpp"

using namespace citopt;

namespace {

const ChatteringConstants& K() {
  static const auto c = solve_constants();
  return c;
}

const SwitchingSurfaces& S() {
  static const SwitchingSurfaces s(K());
  return s;
}

Vec3 v3(const StateVector& x) { return {x[0], x[1], x[2]}; }

double dist(const Vec3& a, const Vec3& b) {
  double m = 0;
  for (int i = 0; i < 3; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// State at the end of the first `n` segments.
Vec3 after(const Vec3& y0, const PiecewiseControl& pc, size_t n) {
  PiecewiseControl head;
  for (size_t i = 0; i < n; ++i) head.add(pc.segments[i].duration, pc.segments[i].level);
  return v3(propagate({y0[0], y0[1], y0[2]}, head));
}

// Checks that the path driven by `ap` actually crosses the recorded switch
// states and ends at (a, 0, 0).
void check_approach(const Vec3& y0, const Approach& ap, double on_tol) {
  const size_t n = ap.control.segments.size();
  REQUIRE(ap.switches.size() + 1 == n);
  for (size_t k = 0; k < ap.switches.size(); ++k) {
    const auto& sp = ap.switches[k];
    const Vec3 y = after(y0, ap.control, k + 1);
    CHECK(dist(y, sp.y) <= on_tol);
    CHECK(dist(S().eval(sp.surface, sp.a, sp.params[0], sp.params[1]), y) <= on_tol);
  }
  const Vec3 yf = after(y0, ap.control, n);
  CHECK(std::abs(yf[0] - ap.a) <= 1e-9);
  CHECK(std::abs(yf[1]) <= 1e-9);
  CHECK(std::abs(yf[2]) <= 1e-9);
}

}  // namespace

TEST_CASE("surface constants") {
  const auto& k = S().constants();
  CHECK(std::abs(k.r_star - 6.4979) <= 1e-3);
  CHECK(std::abs(k.t1_star - 16.8674) <= 1e-3);
  CHECK(std::abs(k.t2_star - 2.7289) <= 1e-3);
  CHECK(std::abs(S().coupling(k.t1_star) - S().coupling(k.t2_star)) <= 1e-9 * S().coupling(k.t1_star));
  // r* is where the coupling function turns around.
  CHECK(S().coupling(k.r_star) < S().coupling(k.r_star * 0.9));
  CHECK(S().coupling(k.r_star) < S().coupling(k.r_star * 1.1));
  const auto k2 = surface_constants(K());
  CHECK(k2.r_star == k.r_star);
}

TEST_CASE("surface evaluation") {
  CHECK(dist(S().eval(SurfaceKind::GammaF, 1, 3), {-2, 1.5, 0}) <= 1e-14);
  CHECK(dist(S().eval(SurfaceKind::GammaMinus, 1, 0), {1, 0, 0}) <= 1e-14);
  CHECK(dist(S().eval(SurfaceKind::GammaF, 1, 0), {1, 0, 0}) <= 1e-14);
  CHECK_THROWS_AS(S().eval(SurfaceKind::GammaMinus, 1, 100), Error);
  CHECK_THROWS_AS(S().eval(SurfaceKind::GammaPlus, 1, 10, 3), Error);
  const auto& k = S().constants();
  const Vec3 end = S().eval(SurfaceKind::GammaPlus, 1, k.t1_star, k.t2_star);
  CHECK(std::abs(end[2]) <= 1e-8);
}

TEST_CASE("surfaces scale with (a, a^2, a^3)") {
  const auto& k = S().constants();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> scale(0.05, 5), u(0, 1);
  for (int it = 0; it < 100; ++it) {
    const double a = scale(rng);
    const double t1 = k.r_star + u(rng) * (k.t1_star - k.r_star);
    const double t2 = S().partner(t1);
    const double tm = u(rng) * k.r_star, tf = 3 * u(rng);
    struct Case {
      SurfaceKind s;
      double p, q;
    };
    for (const auto& [s, p, q] : {Case{SurfaceKind::GammaPlus, t1, t2}, Case{SurfaceKind::GammaMinus, tm, 0.0},
                                  Case{SurfaceKind::GammaF, tf, 0.0}}) {
      const Vec3 one = S().eval(s, 1, p, q), y = S().eval(s, a, p, q);
      CHECK(y[0] == doctest::Approx(a * one[0]).epsilon(1e-14));
      CHECK(y[1] == doctest::Approx(a * a * one[1]).epsilon(1e-14));
      CHECK(y[2] == doctest::Approx(a * a * a * one[2]).epsilon(1e-14));
    }
  }
}

TEST_CASE("classification") {
  CHECK(S().classify({1, 0, 0}) == RegionLabel::OmegaMinus);
  CHECK(S().classify({2, -2, 4.0 / 3}) == RegionLabel::NoChatterCurve);
  const Vec3 f = S().eval(SurfaceKind::GammaF, 1, 1.5);
  CHECK(S().classify(f) == RegionLabel::OnGammaF);
  CHECK(S().classify({f[0] - 0.01, f[1], f[2]}) == RegionLabel::OmegaInfeasible);
  const Vec3 gm = S().eval(SurfaceKind::GammaMinus, 0.8, 3.0);
  CHECK(S().classify(gm) == RegionLabel::OnGammaMinus);
  const auto& k = S().constants();
  const Vec3 gp = S().eval(SurfaceKind::GammaPlus, 0.7, 10.0, S().partner(10.0));
  CHECK(S().classify(gp) == RegionLabel::OnGammaPlus);
  (void)k;
  CHECK_THROWS_AS(S().classify({1, 0, -1}), Error);
}

TEST_CASE("points below the infeasibility sheet cannot keep y3 >= 0") {
  // Forward-simulation oracle: from such a point even v = +1 throughout drives y3 negative.
  for (double t : {0.5, 1.0, 1.5, 2.0, 2.5}) {
    const Vec3 f = S().eval(SurfaceKind::GammaF, 1, t);
    const Vec3 y{f[0] - 0.02, f[1], f[2]};
    CHECK(S().classify(y) == RegionLabel::OmegaInfeasible);
    PiecewiseControl up;
    up.add(6.0, 1.0);
    CHECK(extents(sample({y[0], y[1], y[2]}, up, 1e-3))[2].min < 0);
  }
}

TEST_CASE("approach from e1 is the first chattering cycle") {
  const auto ap = S().synthesize_approach({1, 0, 0});
  CHECK(std::abs(ap.a - K().alpha) <= 1e-8);
  REQUIRE(ap.control.segments.size() == 3);
  const auto cyc = build_cycle_control(K(), 1);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(ap.control.segments[i].duration == doctest::Approx(cyc.segments[i].duration).epsilon(1e-8));
    CHECK(ap.control.segments[i].level == cyc.segments[i].level);
  }
  CHECK(ap.switches[0].surface == SurfaceKind::GammaPlus);
  CHECK(ap.switches[1].surface == SurfaceKind::GammaMinus);
  check_approach({1, 0, 0}, ap, 1e-8);
}

TEST_CASE("approach from a point on gamma-plus") {
  const Vec3 gp = S().eval(SurfaceKind::GammaPlus, 0.7, 10.0, S().partner(10.0));
  const auto ap = S().synthesize_approach(gp);
  REQUIRE(ap.switches.size() == 1);
  CHECK(ap.switches[0].surface == SurfaceKind::GammaMinus);
  check_approach(gp, ap, 1e-8);
  CHECK_THROWS_AS(S().synthesize_approach({2, -2, 4.0 / 3}), Error);
}

TEST_CASE("random states in omega-minus") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u1(-1, 3), u2(-1.5, 1.5), u3(0.01, 1.5);
  int n = 0;
  while (n < 100) {
    const Vec3 y{u1(rng), u2(rng), u3(rng)};
    if (S().classify(y) != RegionLabel::OmegaMinus) continue;
    ++n;
    const auto ap = S().synthesize_approach(y);
    REQUIRE(ap.switches.size() == 2);
    CHECK(ap.switches[0].surface == SurfaceKind::GammaPlus);
    CHECK(ap.switches[1].surface == SurfaceKind::GammaMinus);
    check_approach(y, ap, 1e-6);
  }
}

TEST_CASE("just past gamma-plus the single switch lies on gamma-minus") {
  const auto& k = S().constants();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0, 1), scale(0.2, 3);
  for (int it = 0; it < 100; ++it) {
    const double t1 = k.r_star + 1e-3 + u(rng) * (k.t1_star - k.r_star - 2e-3);
    const double a = scale(rng);
    const Vec3 g = S().eval(SurfaceKind::GammaPlus, a, t1, S().partner(t1));
    const Vec3 y = v3(propagate_segment({g[0], g[1], g[2]}, 1e-3 * a, 1.0));
    const auto ap = S().synthesize_approach(y);
    REQUIRE(ap.switches.size() == 1);
    CHECK(ap.switches[0].surface == SurfaceKind::GammaMinus);
    check_approach(y, ap, 1e-6);
  }
}

TEST_CASE("closure: approach then chattering reaches the origin") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u1(-1, 3), u2(-1.5, 1.5), u3(0.01, 1.5);
  const auto& c = K();
  int n = 0;
  while (n < 25) {
    const Vec3 y0{u1(rng), u2(rng), u3(rng)};
    if (S().classify(y0) != RegionLabel::OmegaMinus) continue;
    ++n;
    const auto ap = S().synthesize_approach(y0);
    PiecewiseControl pc = ap.control;
    for (const auto& s : build_chattering_schedule(c, 8).segments) pc.add(ap.a * s.duration, s.level);
    const auto tr = sample({y0[0], y0[1], y0[2]}, pc, 1e-2);
    CHECK(extents(tr)[2].min >= -1e-9);
    double t = ap.control.duration();
    for (int i = 1; i <= 8; ++i) {
      t += ap.a * std::pow(c.alpha, i - 1) * c.tau1;
      const auto y = state_at({y0[0], y0[1], y0[2]}, pc, std::min(t, pc.t_end()));
      CHECK(y[0] == doctest::Approx(ap.a * std::pow(c.alpha, i)).epsilon(1e-6));
    }
  }
}

TEST_CASE("omega-plus states built from gamma-minus") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.05, 0.95), scale(0.2, 3), back(0.05, 0.5);
  const auto& k = S().constants();
  for (int it = 0; it < 50; ++it) {
    const double a = scale(rng);
    const Vec3 gm = S().eval(SurfaceKind::GammaMinus, a, u(rng) * k.r_star);
    // Flow backward under +1: the forward path reaches gamma-minus without a switch.
    const Vec3 y = v3(propagate_segment({gm[0], gm[1], gm[2]}, -back(rng) * a, 1.0));
    if (y[2] <= 0) continue;
    CHECK(S().classify(y) == RegionLabel::OmegaPlus);
    const auto ap = S().synthesize_approach(y);
    REQUIRE(ap.switches.size() == 1);
    CHECK(ap.switches[0].surface == SurfaceKind::GammaMinus);
    check_approach(y, ap, 1e-6);
  }
}

TEST_CASE("surface mesh csv") {
  std::ostringstream os;
  S().write_csv(os, 3, 4);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "surface,a,t1,t2,y1,y2,y3");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 3 * 3 * 4);
}
