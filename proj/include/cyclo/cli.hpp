#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cyclo::cli {

enum ExitCode : int {
    kOk = 0,
    kMismatch = 1,       // a verification found a difference
    kPrecondition = 2,   // invalid argument / precondition violation
    kBudget = 3,         // memory budget exceeded
    kOverflow = 4,       // 64-bit overflow detected
    kIoError = 5,
    kInternal = 6,
};

/// Runs one subcommand; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Parses non-negative integers written as 123, 1e6 or 10^6.
std::uint64_t parse_count(const std::string& text);

/// Default location of the bundled Table 1 file.
std::string default_table_path();

}  // namespace cyclo::cli
