#pragma once

namespace conecert {

inline constexpr const char* kToolName = "conecert";
inline constexpr const char* kToolVersion = "0.1.0";

} // namespace conecert
