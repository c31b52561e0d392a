#pragma once

namespace folhol {

inline constexpr const char* tool_name = "folhol";
inline constexpr const char* tool_version = "0.1.0";

} // namespace folhol
