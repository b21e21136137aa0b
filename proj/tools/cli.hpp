#pragma once

#include <ostream>

namespace lgtau::cli {

/// Exit codes: 0 all checks pass, 1 mathematical violation, 2 resource,
/// convergence or input failure.
enum Exit : int { ok = 0, violation = 1, failure = 2 };

/// Runs the command line; writes human-readable progress to `out` and
/// diagnostics to `err`. Artifacts go to the --out directory.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace lgtau::cli
