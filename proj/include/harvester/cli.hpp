#pragma once

namespace harvester {

// Command-line entry point.  Returns the process exit code: 0 on success,
// 2 when results are partial (unresolved boxes, non-converged refinements,
// failed checks), 3 on invalid input.  Never lets an exception escape.
int run_cli(int argc, const char* const* argv);

}  // namespace harvester
