#pragma once

namespace vad {

inline constexpr const char* kToolName = "vad";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kFormatVersion = 1;

}  // namespace vad
