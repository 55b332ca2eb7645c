#pragma once

namespace recind {

inline constexpr const char* kToolName = "recind";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace recind
