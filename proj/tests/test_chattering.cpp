#include <doctest.h>

#include <cmath>
#include <sstream>

#include "citopt/chattering.hpp"
#include "citopt/dynamics.hpp"
#include "citopt/error.hpp"

using namespace citopt;

namespace {

const ChatteringConstants& K() {
  static const auto c = solve_constants();
  return c;
}

}  // namespace

TEST_CASE("constants") {
  const auto& c = K();
  CHECK(std::abs(c.alpha - 0.1660687) <= 1e-6);
  CHECK(std::abs(c.beta1 - 0.4698574) <= 1e-6);
  CHECK(std::abs(c.beta2 - 0.8716996) <= 1e-6);
  CHECK(std::abs(c.beta3 - 1.0283610) <= 1e-6);
  CHECK(std::abs(c.tau1 - 4.2479105) <= 1e-6);
  CHECK(std::abs(c.tau_inf - 5.0938372) <= 1e-6);
  const double b = (1 - 2 * (1 - c.beta1) * (1 - c.beta1) + 2 * (1 - c.beta2) * (1 - c.beta2)) * c.tau1 - 2;
  CHECK(std::abs(b) <= 1e-10);
  CHECK(c.tau_inf == c.tau1 / (1 - c.alpha));
  for (double r : constants_residuals(c)) CHECK(std::abs(r) <= 1e-10);
}

TEST_CASE("constants via grid fallback and bad tolerance") {
  ConstantsOptions o;
  o.force_grid_fallback = true;
  const auto g = solve_constants(o);
  CHECK(std::abs(g.alpha - K().alpha) <= 1e-10);
  CHECK(std::abs(g.beta2 - K().beta2) <= 1e-10);
  CHECK_THROWS_WITH_AS(solve_constants(-1.0), doctest::Contains("tolerance must be positive"), Error);
}

TEST_CASE("first cycle") {
  const auto& c = K();
  const auto pc = build_cycle_control(c, 1);
  REQUIRE(pc.segments.size() == 3);
  CHECK(pc.segments[0].duration == doctest::Approx(c.beta1 * c.tau1));
  CHECK(pc.segments[1].duration == doctest::Approx((c.beta2 - c.beta1) * c.tau1));
  CHECK(pc.segments[2].duration == doctest::Approx((1 - c.beta2) * c.tau1));
  CHECK(pc.segments[0].level == -1);
  CHECK(pc.segments[1].level == 1);
  CHECK(pc.segments[2].level == -1);
  const auto y = propagate({1, 0, 0}, pc);
  CHECK(std::abs(y[0] - c.alpha) <= 1e-9);
  CHECK(std::abs(y[1]) <= 1e-9);
  CHECK(std::abs(y[2]) <= 1e-9);
  // 0.1660687 * 4.2479105 = 0.7054455
  CHECK(std::abs(junction_time(c, 2) - junction_time(c, 1) - 0.7054455) <= 1e-6);
}

TEST_CASE("junction-state law and interval lengths") {
  const auto& c = K();
  const auto pc = build_chattering_schedule(c, 12);
  StateVector y{1, 0, 0};
  for (int i = 1; i <= 12; ++i) {
    const double t = junction_time(c, i);
    y = state_at({1, 0, 0}, pc, t);
    CHECK(std::abs(y[0] - std::pow(c.alpha, i)) <= i * 1e-12);
    CHECK(std::abs(y[1]) <= i * 1e-12);
    CHECK(std::abs(y[2]) <= i * 1e-12);
    if (i >= 2) {
      const double d1 = junction_time(c, i) - junction_time(c, i - 1);
      const double d0 = junction_time(c, i - 1) - junction_time(c, i - 2);
      CHECK(d1 == doctest::Approx(c.alpha * d0).epsilon(1e-12));
    }
  }
}

TEST_CASE("schedule truncation") {
  const auto& c = K();
  // Cycle lengths fall below 1e-15 tau1 after 20 cycles.
  CHECK(chattering_cycle_count(c, 40) == 20);
  CHECK(chattering_cycle_count(c, 30) == 20);
  CHECK(chattering_cycle_count(c, 5) == 5);
  const auto pc = build_chattering_schedule(c, 40);
  CHECK(pc.segments.size() == 60);
  CHECK(pc.duration() == doctest::Approx(c.tau_inf).epsilon(1e-14));
  const auto y = propagate({1, 0, 0}, pc);
  CHECK(std::abs(y[0]) < 1e-14);
  const Bounds b{3, {Bound::of(1), Bound::unbounded(), Bound::unbounded(), Bound::unbounded()}};
  const auto ext = extents(sample({1, 0, 0}, pc, 1e-3));
  CHECK(ext[2].min >= -1e-9);
  CHECK(audit(sample({1, 0, 0}, pc, 1e-3), b).worst() <= 1e-9);
}

TEST_CASE("costates") {
  const auto& c = K();
  const auto arc = costates(c, 1.0, 1);
  CHECK(arc.p1(0.5 * c.beta1 * c.tau1) > 0);
  CHECK(arc.p1(0.5 * (c.beta1 + c.beta2) * c.tau1) < 0);
  CHECK(arc.p1(0.5 * (c.beta2 + 1) * c.tau1) > 0);

  // mu_i scales with alpha^{i-1}; see the acceptance run for the stated cubic law.
  for (int i = 1; i <= 5; ++i) {
    const double ratio = costates(c, 2.0, i).mu / (2.0 * std::pow(c.alpha, i - 1));
    CHECK(ratio == doctest::Approx(1.449459412).epsilon(1e-8));
  }

  // p1 is continuous across each junction.
  for (int i = 1; i <= 6; ++i) {
    const auto a = costates(c, 1.0, i), b = costates(c, 1.0, i + 1);
    const double t = junction_time(c, i);
    CHECK(std::abs(a.p1(t) - b.p1(t)) <= 1e-12 * std::max(1.0, std::abs(a.p1(t))));
  }
}

TEST_CASE("control follows -sign(p1)") {
  const auto& c = K();
  const auto pc = build_chattering_schedule(c, 10);
  int checked = 0;
  for (int i = 1; i <= 10; ++i) {
    const auto arc = costates(c, 1.0, i);
    for (int k = 1; k < 400; ++k) {
      const double t = arc.tau_start + (arc.tau_end - arc.tau_start) * k / 400.0;
      const double p = arc.p1(t);
      if (std::abs(p) <= 1e-12) continue;
      double at = pc.t0, v = 0;
      for (const auto& s : pc.segments) {
        if (t < at + s.duration) {
          v = s.level;
          break;
        }
        at += s.duration;
      }
      CHECK(v == (p > 0 ? -1.0 : 1.0));
      ++checked;
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("scaled costates repeat from cycle to cycle") {
  const auto& c = K();
  auto peak = [&](int i, int k) {
    const auto arc = costates(c, 1.0, i);
    double m = 0;
    for (int j = 0; j <= 1000; ++j) {
      const double t = arc.tau_start + (arc.tau_end - arc.tau_start) * j / 1000.0;
      const double w = 1 - t / c.tau_inf;
      const double p = k == 1 ? arc.p1(t) : k == 2 ? arc.p2(t) : arc.p3(t);
      m = std::max(m, std::abs(p) * std::pow(w, k - 4));
    }
    return m;
  };
  for (int k = 1; k <= 3; ++k) {
    const double ref = peak(1, k);
    for (int i = 2; i <= 10; ++i) CHECK(peak(i, k) == doctest::Approx(ref).epsilon(1e-6));
  }
}

TEST_CASE("alpha family") {
  const auto star = family_point(K().alpha);
  CHECK(std::abs(star.j - 1.3452202) <= 1e-6);
  CHECK(std::abs(star.tau1 - K().tau1) <= 1e-9);
  const auto zero = family_point(0.0);
  CHECK(std::abs(zero.j - 1.3467626) <= 1e-6);
  CHECK((zero.j - star.j) / star.j == doctest::Approx(0.0011).epsilon(0.05));
  CHECK_THROWS_AS(family_point(1.0), Error);

  const auto sweep = alpha_sweep(0.0, 0.5, 1e-2);
  CHECK(sweep.size() == 51);
  for (const auto& p : sweep) {
    CHECK(p.j >= star.j - 1e-12);
    if (std::abs(p.alpha - K().alpha) >= 0.01) CHECK(p.j > star.j);
  }
  std::ostringstream os;
  write_sweep_csv(os, sweep);
  CHECK(os.str().rfind("alpha,tau1,beta1,beta2,j1,j\n", 0) == 0);
}

TEST_CASE("homogeneity") {
  const auto& c = K();
  std::vector<double> unit;
  for (int i = 0; i <= 500; ++i) unit.push_back(c.tau_inf * i / 500.0 * 0.999);
  for (double a : {1.0, c.alpha, 0.1, 0.5, 2.0, 10.0}) {
    std::vector<double> grid;
    for (double t : unit) grid.push_back(a * t);
    const double dev = homogeneity_check(c, a, grid);
    if (a == 1.0)
      CHECK(dev == 0.0);
    else
      CHECK(dev <= 1e-8);
  }
  for (double a : {0.1, 0.5, 2.0, 10.0}) {
    PiecewiseControl scaled;
    for (const auto& s : build_chattering_schedule(c).segments) scaled.add(a * s.duration, s.level);
    CHECK(integral_cost({a, 0, 0}, scaled, 3) == doctest::Approx(std::pow(a, 4) * c.j_star).epsilon(1e-9));
  }
}

TEST_CASE("one-switch patterns are infeasible") {
  const auto r = check_infeasible_one_switch();
  CHECK(r.direct_min_residual >= 1e-3);
  CHECK(r.cycle_min_residual >= 1e-3);
  CHECK(r.cycle_degenerate_residual <= 1e-12);
}
