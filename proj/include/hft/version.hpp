#pragma once

namespace hft {

inline constexpr const char* kToolName = "hft";
inline constexpr const char* kVersion = "0.1.0";

} // namespace hft
