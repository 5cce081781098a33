#pragma once

#include <iosfwd>

#include <json.hpp>

#include "citopt/types.hpp"

namespace citopt::cli {

enum ExitCode { Ok = 0, Usage = 1, SolverFailure = 2, InfeasibleRequest = 3 };

// Parses argv (argv[0] is the program name) and runs one subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Report for a `plan` config; throws citopt::Error or nlohmann::json exceptions.
nlohmann::json plan_report(const nlohmann::json& config, const ChatteringConstants& c, int cycles,
                           std::ostream* csv);

}  // namespace citopt::cli
