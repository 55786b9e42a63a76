#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fcnscape::cli {

// Exit codes.
constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace fcnscape::cli
