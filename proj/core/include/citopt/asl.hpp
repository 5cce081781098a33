#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace citopt {

// k = 0: unconstrained arc u = sign*M0. k >= 1: constrained arc x_k = sign*M_k.
struct SystemBehavior {
  int k = 0;
  int sign = 1;
  bool operator==(const SystemBehavior&) const = default;
};

// x_k touches sign*M_k with contact order `degree` (even and < k, or equal to k).
struct TangentMarker {
  int k = 1;
  int sign = 1;
  int degree = 1;
  bool operator==(const TangentMarker&) const = default;
};

using AslItem = std::variant<SystemBehavior, TangentMarker>;
using AugmentedSwitchingLaw = std::vector<AslItem>;

void validate_asl(const AugmentedSwitchingLaw& a);

// ASCII form: "k+" / "k-" for behaviors, "(k+,h)" / "(k-,h)" for markers.
std::string asl_to_text(const AugmentedSwitchingLaw& a);
AugmentedSwitchingLaw asl_parse(std::string_view text);

}  // namespace citopt
