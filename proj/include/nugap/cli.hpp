#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nugap {

// Exit codes (stable contract for scripting):
//   0  success
//   1  numeric failure
//   2  compute finished with d = 1 via condition failure (a valid answer)
//   64 spec / usage parse error
inline constexpr int kExitOk = 0;
inline constexpr int kExitNumericFailure = 1;
inline constexpr int kExitConditionFailed = 2;
inline constexpr int kExitUsage = 64;

// Full command-line front end; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nugap
