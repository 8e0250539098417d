#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace snowlens::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

// args[0] is the command name (no program name). Machine output goes to
// `out`, progress and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace snowlens::cli
