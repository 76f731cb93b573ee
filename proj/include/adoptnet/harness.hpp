#pragma once

#include <string>
#include <vector>

// Command-line front end: subcommand dispatch, preset/config/flag resolution,
// CSV and JSON outputs, and the run manifest that makes every invocation
// reproducible.

namespace adoptnet::cli {

// Entry points for the binary and for in-process tests.  `args` excludes the
// program name.  Returns the process exit code: 0 on success, 2 on a
// configuration or usage error, 3 on a numerical error.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

struct ReductionCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

// The four limiting-case checks behind the `reductions` subcommand:
// stationary fixed-point residual, free-decay half-life, zero-diffusion
// independence, and complete-graph aggregate dynamics.
std::vector<ReductionCheck> run_reduction_checks();

} // namespace adoptnet::cli
