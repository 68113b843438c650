#pragma once

#include <filesystem>
#include <iosfwd>

namespace vinstruct::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `vinstruct` tool: serve, walk, dataset, validate,
/// extract. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Makes a running `serve` return. Also wired to SIGINT and SIGTERM.
void request_shutdown();

/// Directory holding the bundled pneumatic-cylinder data.
std::filesystem::path bundled_data_dir();

}  // namespace vinstruct::cli
