#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hierindex::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Entry point for the `hierindex` tool: build | query | eval | sweep | inspect.
/// Results go to `out`, progress and errors to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hierindex::cli
