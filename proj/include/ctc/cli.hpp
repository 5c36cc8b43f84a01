#pragma once

#include <filesystem>
#include <ostream>
#include <string_view>

namespace ctc {

/// Exit statuses of the `ctc` tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,  // validation failure or unusable input data
    kExitUsage = 2,
};

/// Entry point for the `ctc` command line. Subcommands: validate, apply,
/// score, corrupt, stats, leaderboard.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace ctc
