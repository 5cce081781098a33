// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "citopt/chattering.hpp"
#include "citopt/dynamics.hpp"
#include "citopt/nonexistence.hpp"
#include "citopt/oracle.hpp"
#include "citopt/planner.hpp"
#include "citopt/surfaces.hpp"

using namespace citopt;

namespace {

struct Check {
  std::string what;
  bool pass;
  bool info = false;
};

class Criterion {
 public:
  explicit Criterion(int id, std::string title) : id_(id), title_(std::move(title)) {}

  void expect(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4))) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    checks_.push_back({buf, ok});
  }

  void info(const char* fmt, ...) __attribute__((format(printf, 2, 3))) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    checks_.push_back({buf, true, true});
  }

  bool report() const {
    bool ok = true;
    for (const auto& c : checks_) ok = ok && c.pass;
    std::printf("criterion %2d: %s  %s\n", id_, ok ? "PASS" : "FAIL", title_.c_str());
    for (const auto& c : checks_)
      std::printf("    %s %s\n", c.info ? "info" : c.pass ? "ok  " : "MISS", c.what.c_str());
    return ok;
  }

 private:
  int id_;
  std::string title_;
  std::vector<Check> checks_;
};

double seconds_of(const std::function<void()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool near(double v, double ref, double tol) { return std::abs(v - ref) <= tol; }

Vec3 v3(const StateVector& x) { return {x[0], x[1], x[2]}; }

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  bool all = true;

  ChatteringConstants c;
  {
    Criterion k(1, "chattering constants");
    const double t = seconds_of([&] { c = solve_constants(1e-12); });
    k.expect(near(c.alpha, 0.1660687, 1e-6), "alpha   %.10f", c.alpha);
    k.expect(near(c.beta1, 0.4698574, 1e-6), "beta1   %.10f", c.beta1);
    k.expect(near(c.beta2, 0.8716996, 1e-6), "beta2   %.10f", c.beta2);
    k.expect(near(c.beta3, 1.0283610, 1e-6), "beta3   %.10f", c.beta3);
    k.expect(near(c.tau1, 4.2479105, 1e-6), "tau1    %.10f", c.tau1);
    k.expect(near(c.tau_inf, 5.0938372, 1e-6), "tau_inf %.10f", c.tau_inf);
    double worst = 0;
    for (double r : constants_residuals(c)) worst = std::max(worst, std::abs(r));
    k.expect(worst <= 1e-10, "max residual %.2e", worst);
    k.expect(t < 1.0, "runtime %.3f s", t);
    all = k.report() && all;
  }

  {
    Criterion k(2, "family cost values");
    const auto star = family_point(c.alpha), zero = family_point(0.0);
    k.expect(near(star.j, 1.3452202, 1e-6), "J(alpha*) %.10f", star.j);
    k.expect(near(zero.j, 1.3467626, 1e-6), "J(0)      %.10f", zero.j);
    const double rel = (zero.j - star.j) / star.j;
    k.expect(near(rel, 0.0011, 0.00005), "relative gap %.5f%%", 100 * rel);
    std::vector<double> grid;
    for (int i = 0; i <= 500; ++i) grid.push_back(i * 1e-3);
    const auto g = oracle::alpha_grid_optimum(grid);
    k.expect(near(g.alpha, c.alpha, 1e-5), "oracle grid argmin %.10f", g.alpha);
    all = k.report() && all;
  }

  {
    Criterion k(3, "costate law");
    bool cubic = true, linear = true;
    for (int i = 1; i <= 5; ++i) {
      const double mu = costates(c, 1.0, i).mu;
      const double r3 = mu / std::pow(c.alpha, 3 * i - 3), r1 = mu / std::pow(c.alpha, i - 1);
      cubic = cubic && near(r3, 1.4494594, 1e-5);
      linear = linear && near(r1, 1.4494594, 1e-5);
      k.info("i=%d  mu/(p0 a^(3i-3)) = %.7g   mu/(p0 a^(i-1)) = %.10f", i, r3, r1);
    }
    k.expect(cubic, "mu_i/(p0 alpha^(3i-3)) = 1.4494594 for i = 1..5");
    k.expect(linear, "mu_i/(p0 alpha^(i-1)) = 1.4494594 for i = 1..5 (scaling forced by the costate equations)");
    const auto pc = build_chattering_schedule(c, 10);
    long bad = 0, seen = 0;
    for (int i = 1; i <= 10; ++i) {
      const auto arc = costates(c, 1.0, i);
      double at = junction_time(c, i - 1);
      size_t seg = static_cast<size_t>(3 * (i - 1));
      for (int j = 1; j < 2000; ++j) {
        const double t = arc.tau_start + (arc.tau_end - arc.tau_start) * j / 2000.0;
        while (seg + 1 < pc.segments.size() && t >= at + pc.segments[seg].duration) at += pc.segments[seg++].duration;
        const double p = arc.p1(t);
        if (std::abs(p) <= 1e-12) continue;
        ++seen;
        if (pc.segments[seg].level != (p > 0 ? -1.0 : 1.0)) ++bad;
      }
    }
    k.expect(bad == 0, "v = -sgn(p1) at %ld/%ld grid points", seen - bad, seen);
    all = k.report() && all;
  }

  {
    Criterion k(4, "bounded transfer plan");
    const TransferSpec s{1, 1, -1, 0, 10};
    TransferSolution sol;
    const double t = seconds_of([&] { sol = solve_transfer(s, c, 40); });
    k.expect(near(sol.t_inf, 5.0938372, 1e-6), "t_inf %.10f", sol.t_inf);
    k.expect(near(sol.t_f, 11.3452202, 1e-6), "t_f   %.10f", sol.t_f);
    double worst = 0;
    bool junctions = true;
    for (size_t i = 0; i < sol.junction_states.size(); ++i) {
      const double err = std::abs(sol.junction_states[i][0] - std::pow(c.alpha, i + 1) * s.x01);
      junctions = junctions && err <= (i + 1) * 1e-10;
      worst = std::max(worst, err);
    }
    k.expect(junctions, "junction states x1(t_i) = alpha^i x01, worst %.2e over %zu", worst,
             sol.junction_states.size());
    const double aw = transfer_audit(s, sol.trajectory);
    k.expect(aw <= 1e-9, "audit worst %.2e", aw);
    k.expect(t < 1.0, "runtime %.3f s", t);
    all = k.report() && all;
  }

  {
    Criterion k(5, "direct-entry comparison");
    const TransferSpec s{1, 1, -1, 0, 10};
    const auto opt = solve_transfer(s, c);
    const auto mim = solve_transfer_mim(s);
    k.expect(near(mim.t_inf, 4.3903, 1e-3), "t_inf(direct) %.7f", mim.t_inf);
    k.expect(near(mim.t_f - opt.t_f, 1.5425e-3, 1e-6), "t_f gap %.7e", mim.t_f - opt.t_f);
    const double lead = opt.t_inf - mim.t_inf;
    k.expect(near(lead, 0.1424, 1e-3), "t_inf(opt) - t_inf(direct) = %.7f (target 0.1424)", lead);
    k.info("t_inf(direct) - tau1 = %.7f", mim.t_inf - c.tau1);
    all = k.report() && all;
  }

  {
    Criterion k(6, "rest-to-rest transfer");
    const Bounds b{4, {Bound::of(1), Bound::of(1), Bound::of(1.5), Bound::of(4), Bound::of(15)}};
    RestToRestResult r;
    const double t = seconds_of([&] { r = plan_rest_to_rest(RestToRestSpec::symmetric(b), c); });
    k.expect(near(r.t_f_opt, 12.6645, 5e-3), "t_f_opt %.7f", r.t_f_opt);
    k.expect(near(r.t_f_mim, 12.6667, 5e-3), "t_f_mim %.7f", r.t_f_mim);
    k.expect(r.audit.worst() <= 1e-6, "audit worst %.2e", r.audit.worst());
    k.expect(t < 10.0, "runtime %.3f s", t);
    all = k.report() && all;
  }

  {
    Criterion k(7, "switching surfaces");
    const SwitchingSurfaces sw(c);
    const auto& sc = sw.constants();
    k.expect(near(sc.r_star, 6.4979, 1e-3), "r*  %.7f", sc.r_star);
    k.expect(near(sc.t1_star, 16.8674, 1e-3), "t1* %.7f", sc.t1_star);
    k.expect(near(sc.t2_star, 2.7289, 1e-3), "t2* %.7f", sc.t2_star);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u1(-1, 3), u2(-1.5, 1.5), u3(0.01, 1.5);
    int n = 0, good = 0;
    double worst_on = 0, worst_end = 0;
    while (n < 100) {
      const Vec3 y0{u1(rng), u2(rng), u3(rng)};
      if (sw.classify(y0) != RegionLabel::OmegaMinus) continue;
      ++n;
      try {
        const auto ap = sw.synthesize_approach(y0);
        bool ok = ap.switches.size() == 2 && ap.switches[0].surface == SurfaceKind::GammaPlus &&
                  ap.switches[1].surface == SurfaceKind::GammaMinus;
        const auto bs = boundary_states({y0[0], y0[1], y0[2]}, ap.control);
        for (size_t i = 0; ok && i < ap.switches.size(); ++i) {
          const auto& sp = ap.switches[i];
          const Vec3 on = sw.eval(sp.surface, sp.a, sp.params[0], sp.params[1]);
          const Vec3 y = v3(bs[i + 1]);
          for (int d = 0; d < 3; ++d) worst_on = std::max(worst_on, std::abs(on[d] - y[d]));
        }
        const auto& e = bs.back();
        const double end = std::max({std::abs(e[1]), std::abs(e[2]), std::abs(e[0] - ap.a)});
        worst_end = std::max(worst_end, end);
        if (ok) ++good;
      } catch (const std::exception&) {
      }
    }
    k.expect(good == 100, "%d/100 omega-minus states give switches on Gamma+ then Gamma-", good);
    k.expect(worst_on <= 1e-6, "switch states on their surfaces, worst %.2e", worst_on);
    k.expect(worst_end <= 1e-9, "end state (a, 0, 0), worst %.2e", worst_end);
    all = k.report() && all;
  }

  {
    Criterion k(8, "non-existence diagnostics");
    RecursionReport rep;
    JacobianSweep js;
    const double t = seconds_of([&] {
      rep = run_recursion(1.0, 0.9, 100000);
      js = jacobian_sweep(100);
    });
    k.expect(rep.strictly_decreasing, "recursion strictly decreasing with positive roots");
    k.expect(near(rep.i_r_tail, 0.25, 0.005), "i r_i at 1e5     %.7f", rep.i_r_tail);
    k.expect(near(rep.raabe_tail, 0.25, 0.005), "Raabe at 1e5     %.7f", rep.raabe_tail);
    k.expect(js.max_relative_det <= 1e-9, "Jacobian det relative %.2e", js.max_relative_det);
    k.expect(js.max_relative_factor <= 1e-9, "factorization relative %.2e", js.max_relative_factor);
    k.expect(t < 5.0, "runtime %.3f s", t);
    all = k.report() && all;
  }

  {
    Criterion k(9, "property suites");
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> len(0.01, 0.5), lvl(-1, 1);
    double semi = 0, rk = 0;
    for (int it = 0; it < 50; ++it) {
      PiecewiseControl a, b;
      for (int j = 0; j < 5; ++j) a.add(len(rng), lvl(rng)), b.add(len(rng), lvl(rng));
      const StateVector x0{lvl(rng), lvl(rng), lvl(rng), lvl(rng)};
      PiecewiseControl ab = a;
      ab.append(b);
      const auto p = propagate(x0, ab), q = propagate(propagate(x0, a), b);
      const auto r = oracle::rk4_reference(x0, ab, 1e-4);
      for (size_t d = 0; d < 4; ++d) {
        semi = std::max(semi, std::abs(p[d] - q[d]) / std::max(1.0, std::abs(p[d])));
        rk = std::max(rk, std::abs(p[d] - r[d]));
      }
    }
    k.expect(semi <= 1e-12, "semigroup relative %.2e", semi);
    k.expect(rk <= 1e-8, "RK4 agreement %.2e", rk);

    double hom = 0;
    for (double a : {0.1, 0.5, 2.0, 10.0}) {
      std::vector<double> grid;
      for (int i = 0; i <= 400; ++i) grid.push_back(a * c.tau_inf * 0.999 * i / 400.0);
      hom = std::max(hom, homogeneity_check(c, a, grid));
    }
    k.expect(hom <= 1e-8, "homogeneity deviation %.2e", hom);

    // Rate ratios over the last 10 of 20 cycles, each cycle from its exact junction state.
    double spread = 0;
    for (int kk = 1; kk <= 4; ++kk) {
      double lo = INFINITY, hi = 0;
      for (int i = 11; i <= 20; ++i) {
        const double sc = std::pow(c.alpha, i - 1);
        PiecewiseControl cyc;
        for (const auto& s : build_cycle_control(c, 1).segments) cyc.add(sc * s.duration, s.level);
        double sup = 0;
        for (int j = 0; j <= 200; ++j) {
          const double s = cyc.duration() * j / 200.0;
          const auto y = state_at({sc, 0, 0, 0}, cyc, s);
          const double dev = kk < 4 ? std::abs(y[static_cast<size_t>(kk - 1)]) : std::abs(std::pow(sc, 4) * c.j_star - y[3]);
          sup = std::max(sup, dev / std::pow(sc * c.tau_inf - s, kk));
        }
        lo = std::min(lo, sup);
        hi = std::max(hi, sup);
      }
      spread = std::max(spread, std::isfinite(hi) ? hi / lo - 1 : INFINITY);
    }
    k.expect(spread <= 1e-6, "rate ratios bounded and constant over cycles 11..20, spread %.2e", spread);

    const auto sol = solve_transfer({1, 1, -1, 0, 10}, c);
    int max_sw = 0;
    for (int i = 0; i < sol.cycles; ++i) {
      int n = 0;
      for (int j = 1; j < 3; ++j)
        n += sol.control.segments[static_cast<size_t>(3 * i + j)].level !=
             sol.control.segments[static_cast<size_t>(3 * i + j - 1)].level;
      max_sw = std::max(max_sw, n);
    }
    k.expect(max_sw <= 3, "switches per cycle <= %d", max_sw);

    double cost_dev = 0;
    for (int kk = 1; kk <= 3; ++kk) {
      std::vector<double> peaks;
      for (int i = 1; i <= 10; ++i) {
        const auto arc = costates(c, 1.0, i);
        double m = 0;
        for (int j = 0; j <= 1000; ++j) {
          const double t = arc.tau_start + (arc.tau_end - arc.tau_start) * j / 1000.0;
          const double p = kk == 1 ? arc.p1(t) : kk == 2 ? arc.p2(t) : arc.p3(t);
          m = std::max(m, std::abs(p) * std::pow(1 - t / c.tau_inf, kk - 4));
        }
        peaks.push_back(m);
      }
      for (double p : peaks) cost_dev = std::max(cost_dev, std::abs(p / peaks[0] - 1));
    }
    k.expect(cost_dev <= 1e-6, "scaled-costate cycle max constant, deviation %.2e", cost_dev);
    all = k.report() && all;
  }

  {
    Criterion k(10, "emptiness and uniqueness certificates");
    oracle::LandscapeOptions o;
    o.constants = c;
    const auto l_const = oracle::residual_landscape(oracle::System::Constants, o);
    const auto l_surf = oracle::residual_landscape(oracle::System::SurfacePair, o);
    const auto l_arc = oracle::residual_landscape(oracle::System::SingleArc, o);
    const auto l_cycle = oracle::residual_landscape(oracle::System::OneSwitchCycle, o);
    k.expect(l_const.basins == 1, "constants system basins %d", l_const.basins);
    k.expect(l_surf.basins == 1, "surface system basins %d", l_surf.basins);
    k.expect(l_arc.min_residual >= 1e-3, "single-arc system min residual %.4g", l_arc.min_residual);
    k.expect(l_cycle.min_residual >= 1e-3, "one-switch cycle system min residual %.4g", l_cycle.min_residual);
    all = k.report() && all;
  }

  std::printf("%s\n", all ? "all criteria passed" : "some criteria failed");
  return all ? 0 : 1;
}
