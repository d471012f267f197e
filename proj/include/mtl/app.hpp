#pragma once

#include <ostream>

namespace mtl {

/// Command-line entry point:
///
///     mtl <simulate|equilibrium|fixed-points|sweep2d|hysteresis|surface> CONFIG
///         [--k K] [--lambda L] [--out PATH] [--jobs N]
///
/// Returns 0 on success, 1 for an invalid config or usage, 2 when a single-run command
/// does not converge.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mtl
