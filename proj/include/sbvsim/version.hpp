#pragma once

namespace sbvsim {

inline constexpr const char* kVersion = "1.0.0";

} // namespace sbvsim
