#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "edm/error.hpp"

namespace edm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;  // bad flags, config or schema
inline constexpr int kExitData = 3;   // input data that cannot be processed

int exit_code(ErrorKind kind);

// Entry point shared by the executable and the tests. args[0] is the program
// name. Failures print one line to `err`:
//   edm: error kind=<kind> command=<name> message="<text>"
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace edm::cli
