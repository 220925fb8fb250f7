#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vad::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitCompatibility = 3;

int run(int argc, char** argv);

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vad::cli
