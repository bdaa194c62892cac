#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lipvi::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int data = 2;
inline constexpr int eta_exhausted = 3;
inline constexpr int reject = 4;
}  // namespace exit_code

/// Entry point shared by the `lipvi` binary and the tests. args excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lipvi::cli
