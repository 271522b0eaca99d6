#pragma once

namespace dro {

/// Command-line entry point (argv-style). Exit codes: 0 success,
/// 1 check-kappa bound failure, 2 run-time integration fault or divergence,
/// 3 configuration error.
int run_cli(int argc, const char* const* argv);

}  // namespace dro
