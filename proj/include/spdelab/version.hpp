#pragma once

namespace spdelab {

inline constexpr const char* version = "0.1.0";

}  // namespace spdelab
