#pragma once

namespace co4 {

inline constexpr const char* kVersion = "0.1.0";

} // namespace co4
