#pragma once

#include <iosfwd>
#include <string>
#include <vector>

// Command-line front end. The report goes to `out`, diagnostics to `err`.
namespace gurarij::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitUsage = 64;

/// `args` excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gurarij::cli
