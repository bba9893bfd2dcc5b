#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "berkline/algebra.hpp"
#include "berkline/expq.hpp"

namespace berkline {

enum class OutputFormat { json, csv, dot, text };

// Run-wide knobs shared by every subcommand. Defaults: precision O(t^6)
// (overridable by the BERKLINE_PRECISION environment variable), ramification
// bound 64, iterate degree cap 81.
struct RunConfig {
  ExpQ precision{6};
  ToleranceConfig tolerances;
  std::int64_t ramificationBound = 64;
  int degreeCap = 81;
  OutputFormat outputFormat = OutputFormat::json;
};

// Executes one CLI invocation: argv without the program name. Reports go to
// out; machine-readable diagnostics go to err. Returns 0 on success, 1 on
// verification failure, 2 on input/usage errors.
int runCommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace berkline
