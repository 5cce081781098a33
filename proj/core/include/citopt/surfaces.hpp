#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "citopt/types.hpp"

namespace citopt {

using Vec3 = std::array<double, 3>;

enum class SurfaceKind { GammaPlus, GammaMinus, GammaF };

enum class RegionLabel {
  OmegaMinus,
  OmegaPlus,
  OmegaInfeasible,
  OnGammaPlus,
  OnGammaMinus,
  OnGammaF,
  NoChatterCurve,
};

const char* to_string(SurfaceKind s);
const char* to_string(RegionLabel r);

struct SurfaceConstants {
  double r_star = 0.0;
  double t1_star = 0.0;
  double t2_star = 0.0;
};

struct SurfacePoint {
  SurfaceKind surface = SurfaceKind::GammaPlus;
  double a = 0.0;
  // (t1, t2) for GammaPlus; (t, 0) otherwise.
  std::array<double, 2> params{};
  Vec3 y{};
};

struct Approach {
  PiecewiseControl control;
  double a = 0.0;  // junction state is (a, 0, 0)
  // Switch states in order, with the surface each lies on.
  std::vector<SurfacePoint> switches;
};

// Switching surfaces of the scaled problem with the state constraint y3 >= 0.
class SwitchingSurfaces {
 public:
  explicit SwitchingSurfaces(const ChatteringConstants& c, double tol = 1e-12);

  const SurfaceConstants& constants() const { return k_; }

  // f(r) = r * prod(1 + beta_k tau1 / r).
  double coupling(double r) const;
  // Partner t2 in (0, r*] with f(t2) = f(t1), for t1 >= r*.
  double partner(double t1) const;

  Vec3 eval(SurfaceKind s, double a, double t1, double t2 = 0.0) const;
  SurfacePoint point(SurfaceKind s, double a, double t1, double t2 = 0.0) const;

  RegionLabel classify(const Vec3& y, double tol = 1e-9) const;

  // Control (at most two switches) that drives y0 to (a, 0, 0).
  Approach synthesize_approach(const Vec3& y0, double tol = 1e-10) const;

  // Mesh dump: n_a scales by n_t parameter values per surface.
  void write_csv(std::ostream& os, int n_a, int n_t, double a_max = 1.0) const;

 private:
  struct Sheet {
    SurfaceKind kind;
    double theta;
    Vec3 c;  // unit-scale point
  };
  // Gamma-minus for theta <= r*, Gamma-plus beyond.
  Sheet sheet_point(double theta) const;

  ChatteringConstants c_;
  SurfaceConstants k_;
};

SurfaceConstants surface_constants(const ChatteringConstants& c, double tol = 1e-12);

}  // namespace citopt
