#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "citopt/chattering.hpp"
#include "citopt/dynamics.hpp"
#include "citopt/error.hpp"
#include "citopt/nonexistence.hpp"
#include "citopt/oracle.hpp"
#include "citopt/planner.hpp"
#include "citopt/surfaces.hpp"

namespace citopt::cli {

using nlohmann::json;

namespace {

int code_for(ErrorCode e) {
  switch (e) {
    case ErrorCode::DisplacementTooSmall:
    case ErrorCode::Infeasible:
    case ErrorCode::CruiseImpossible:
    case ErrorCode::NotInFeasibleBox:
    case ErrorCode::NegativeY3:
    case ErrorCode::OnNoChatterCurve:
      return InfeasibleRequest;
    case ErrorCode::ParseError:
    case ErrorCode::LengthMismatch:
    case ErrorCode::NonPositiveBound:
    case ErrorCode::InfiniteControlBound:
    case ErrorCode::OrderMismatch:
      return Usage;
    default:
      return SolverFailure;
  }
}

json schedule_json(const PiecewiseControl& pc) {
  json a = json::array();
  double t = pc.t0;
  for (const auto& s : pc.segments) {
    a.push_back({{"t0", t}, {"duration", s.duration}, {"level", s.level}});
    t += s.duration;
  }
  return a;
}

json audit_json(const AuditReport& r) {
  json v = json::array();
  for (double x : r.max_violation) v.push_back(std::isfinite(x) ? json(x) : json(nullptr));
  return {{"worst", r.worst()}, {"max_violation", v}};
}

json constants_json(const ChatteringConstants& c) {
  return {{"alpha", c.alpha}, {"beta1", c.beta1}, {"beta2", c.beta2}, {"beta3", c.beta3},
          {"tau1", c.tau1},   {"tau_inf", c.tau_inf}, {"j1", c.j1},   {"j_star", c.j_star}};
}

// Output goes to the file named by `path`, or to `fallback` when path is empty.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      os_ = &fallback;
      return;
    }
    file_.open(path);
    if (!file_) fail(ErrorCode::InvalidArgument, "cannot open " + path + " for writing");
    os_ = &file_;
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_ = nullptr;
};

Bounds bounds_from(const json& j) {
  Bounds b;
  b.order = static_cast<int>(j.size()) - 1;
  for (const auto& v : j) b.m.push_back(v.is_null() ? Bound::unbounded() : Bound::of(v.get<double>()));
  validate_bounds(b);
  return b;
}

}  // namespace

json plan_report(const json& config, const ChatteringConstants& c, int cycles, std::ostream* csv) {
  const std::string mode = config.at("mode").get<std::string>();
  json rep;
  if (mode == "transfer") {
    TransferSpec s;
    s.m0 = config.at("m0").get<double>();
    s.m3 = config.at("m3").get<double>();
    s.x01 = config.at("x01").get<double>();
    s.x04 = config.at("x04").get<double>();
    s.xf4 = config.at("xf4").get<double>();
    const auto sol = solve_transfer(s, c, cycles, config.value("dt", 1e-2));
    rep = {{"mode", mode},
           {"t_inf", sol.t_inf},
           {"t_f", sol.t_f},
           {"cycles", sol.cycles},
           {"junction_times", sol.junction_times},
           {"schedule", schedule_json(sol.control)},
           {"audit", {{"worst", transfer_audit(s, sol.trajectory)}}}};
    if (csv) write_csv(*csv, sol.trajectory);
  } else if (mode == "rest_to_rest") {
    const Bounds b = bounds_from(config.at("bounds"));
    RestToRestSpec s = RestToRestSpec::symmetric(b);
    s.x04 = config.value("x04", s.x04);
    s.xf4 = config.value("xf4", s.xf4);
    const auto r = plan_rest_to_rest(s, c, 1e-10, config.value("dt", 1e-3));
    // Chattering junctions of the acceleration phase.
    const double lambda = -r.x01_opt / b.control();
    const double t_entry = r.t_inf - lambda * c.tau_inf;
    std::vector<double> tj;
    const int n = chattering_cycle_count(c, cycles);
    for (int i = 1; i <= n; ++i) tj.push_back(t_entry + lambda * junction_time(c, i));
    rep = {{"mode", mode},
           {"t_inf", r.t_inf},
           {"t_f", r.t_f_opt},
           {"t_f_mim", r.t_f_mim},
           {"gap", r.t_f_mim - r.t_f_opt},
           {"x01", r.x01_opt},
           {"junction_times", tj},
           {"schedule", schedule_json(r.control)},
           {"audit", audit_json(r.audit)}};
    if (csv) write_csv(*csv, r.trajectory);
  } else {
    fail(ErrorCode::ParseError, "unknown mode '" + mode + "'");
  }
  return rep;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-optimal chattering trajectories for integrator chains"};
  app.require_subcommand(1);

  double tol = 1e-12;
  std::string out_path, config_path;
  int cycles = 40;

  auto* constants = app.add_subcommand("constants", "Solve the chattering constants");
  constants->add_option("--tol", tol, "Solver tolerance");

  auto* plan = app.add_subcommand("plan", "Plan a trajectory from a JSON config");
  plan->add_option("--config", config_path, "Config file")->required();
  plan->add_option("--out", out_path, "Output prefix for <out>.csv and <out>.json");
  plan->add_option("--cycles", cycles, "Chattering cycles to emit");
  plan->add_option("--tol", tol, "Solver tolerance");

  double from = 0.0, to = 0.5, step = 1e-3;
  auto* sweep = app.add_subcommand("sweep", "Cost of the one-cycle family over alpha");
  sweep->add_option("--from", from);
  sweep->add_option("--to", to);
  sweep->add_option("--step", step);
  sweep->add_option("--out", out_path, "CSV file");
  sweep->add_option("--tol", tol, "Solver tolerance");

  int n_a = 20, n_t = 40;
  double a_max = 1.0;
  auto* surfaces = app.add_subcommand("surfaces", "Dump switching-surface meshes");
  surfaces->add_option("--na", n_a, "Scale samples");
  surfaces->add_option("--nt", n_t, "Parameter samples");
  surfaces->add_option("--amax", a_max, "Largest scale");
  surfaces->add_option("--out", out_path, "CSV file");
  surfaces->add_option("--tol", tol, "Solver tolerance");

  std::vector<double> y;
  bool approach = false;
  auto* classify = app.add_subcommand("classify", "Region of a scaled state");
  classify->add_option("--y", y, "y1,y2,y3")->required()->delimiter(',')->expected(3);
  classify->add_flag("--approach", approach, "Also print the synthesized approach as JSON");
  classify->add_option("--tol", tol, "Solver tolerance");

  double tau1 = 1.0, tau2 = 0.9;
  int n_steps = 100000, stride = 0;
  auto* recursion = app.add_subcommand("recursion", "Junction-time recursion diagnostics");
  recursion->add_option("--tau1", tau1);
  recursion->add_option("--tau2", tau2);
  recursion->add_option("-n,--steps", n_steps);
  recursion->add_option("--stride", stride, "Row stride (default n/1000)");
  recursion->add_option("--out", out_path, "CSV file");

  std::string axes = "m0m1";
  std::vector<double> p, q;
  auto* gap = app.add_subcommand("gap", "Rest-to-rest time gap over a bound grid");
  gap->add_option("--config", config_path, "rest_to_rest config supplying the base bounds")->required();
  gap->add_option("--axes", axes, "m0m1 or m1m2")->check(CLI::IsMember({"m0m1", "m1m2"}));
  gap->add_option("--p", p, "First-axis values")->delimiter(',')->required();
  gap->add_option("--q", q, "Second-axis values")->delimiter(',')->required();
  gap->add_option("--out", out_path, "CSV file");

  auto* verify = app.add_subcommand("verify", "Run the built-in numerical checks");
  verify->add_option("--tol", tol, "Solver tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err) == 0 ? Ok : Usage;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return Usage;
  }

  auto read_config = [&]() {
    std::ifstream f(config_path);
    if (!f) fail(ErrorCode::ParseError, "cannot read " + config_path);
    return json::parse(f);
  };

  try {
    if (!(tol > 0)) fail(ErrorCode::InvalidArgument, "tolerance must be positive");
    if (cycles < 1) fail(ErrorCode::InvalidArgument, "--cycles must be positive");

    if (*constants) {
      const auto c = solve_constants(tol);
      json j = constants_json(c);
      j["residuals"] = constants_residuals(c);
      j["tol"] = tol;
      out << j.dump(2) << '\n';
      return Ok;
    }

    if (*sweep) {
      Sink s(out_path, out);
      write_sweep_csv(*s, alpha_sweep(from, to, step, tol));
      return Ok;
    }

    if (*surfaces) {
      SwitchingSurfaces sw(solve_constants(tol), tol);
      Sink s(out_path, out);
      sw.write_csv(*s, n_a, n_t, a_max);
      return Ok;
    }

    if (*classify) {
      SwitchingSurfaces sw(solve_constants(tol));
      const Vec3 v{y[0], y[1], y[2]};
      const RegionLabel r = sw.classify(v);
      if (!approach) {
        out << to_string(r) << '\n';
        return Ok;
      }
      const Approach a = sw.synthesize_approach(v);
      json sw_j = json::array();
      for (const auto& pt : a.switches)
        sw_j.push_back({{"surface", to_string(pt.surface)}, {"y", pt.y}});
      out << json{{"region", to_string(r)}, {"a", a.a}, {"switches", sw_j}, {"schedule", schedule_json(a.control)}}
                 .dump(2)
          << '\n';
      return Ok;
    }

    if (*recursion) {
      const auto r = run_recursion(tau1, tau2, n_steps);
      Sink s(out_path, out);
      write_recursion_csv(*s, r, stride > 0 ? stride : std::max(1, n_steps / 1000));
      if (!out_path.empty())
        out << json{{"i_r", r.i_r_tail}, {"raabe", r.raabe_tail}, {"strictly_decreasing", r.strictly_decreasing}}
                   .dump(2)
            << '\n';
      return Ok;
    }

    if (*gap) {
      const json cfg = read_config();
      const Bounds b = bounds_from(cfg.at("bounds"));
      RestToRestSpec base = RestToRestSpec::symmetric(b);
      base.x04 = cfg.value("x04", base.x04);
      base.xf4 = cfg.value("xf4", base.xf4);
      const auto g = gap_surface(base, solve_constants(tol), axes == "m0m1" ? GapAxes::M0M1 : GapAxes::M1M2, p, q);
      Sink s(out_path, out);
      write_gap_csv(*s, g);
      return Ok;
    }

    if (*plan) {
      const json cfg = read_config();
      const auto c = solve_constants(tol);
      json rep;
      if (out_path.empty()) {
        rep = plan_report(cfg, c, cycles, nullptr);
        out << rep.dump(2) << '\n';
      } else {
        std::ofstream csv(out_path + ".csv");
        if (!csv) fail(ErrorCode::InvalidArgument, "cannot open " + out_path + ".csv");
        rep = plan_report(cfg, c, cycles, &csv);
        std::ofstream js(out_path + ".json");
        js << rep.dump(2) << '\n';
      }
      return Ok;
    }

    if (*verify) {
      json checks = json::array();
      bool all = true;
      auto add = [&](const char* name, double value, bool pass) {
        checks.push_back({{"name", name}, {"value", value}, {"pass", pass}});
        all = all && pass;
      };
      const auto c = solve_constants(tol);
      const auto res = constants_residuals(c);
      double worst = 0;
      for (double r : res) worst = std::max(worst, std::abs(r));
      add("constants_residual", worst, worst <= 1e-10);

      const auto sol = solve_transfer(TransferSpec{}, c, cycles);
      const double aw = transfer_audit(TransferSpec{}, sol.trajectory);
      add("transfer_audit", aw, aw <= 1e-9);

      oracle::LandscapeOptions lo;
      lo.constants = c;
      const auto l_const = oracle::residual_landscape(oracle::System::Constants, lo);
      add("alpha_system_basins", l_const.basins, l_const.basins == 1);
      const auto l_surf = oracle::residual_landscape(oracle::System::SurfacePair, lo);
      add("surface_system_basins", l_surf.basins, l_surf.basins == 1);
      const auto l_arc = oracle::residual_landscape(oracle::System::SingleArc, lo);
      add("single_arc_min_residual", l_arc.min_residual, l_arc.min_residual >= 1e-3);
      const auto l_cycle = oracle::residual_landscape(oracle::System::OneSwitchCycle, lo);
      add("one_switch_cycle_min_residual", l_cycle.min_residual, l_cycle.min_residual >= 1e-3);

      const auto rec = run_recursion(1.0, 0.9, 100000);
      add("recursion_i_r", rec.i_r_tail, std::abs(rec.i_r_tail - 0.25) <= 0.005 && rec.strictly_decreasing);

      out << json{{"checks", checks}, {"pass", all}}.dump(2) << '\n';
      return all ? Ok : SolverFailure;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return code_for(e.code());
  } catch (const json::exception& e) {
    err << "error: malformed config: " << e.what() << '\n';
    return Usage;
  }
  return Usage;
}

}  // namespace citopt::cli
