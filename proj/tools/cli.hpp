#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "meps/errors.hpp"

namespace meps::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitNumerical = 3;

/// 1 for malformed input, 2 for failed hypotheses / infeasible certificates /
/// inadmissible configurations, 3 for numerical blow-up.
int exit_code(ErrorKind kind) noexcept;

/// args excludes the program name. JSON goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace meps::cli
