#pragma once

namespace rtq {

inline constexpr const char* kVersion = "0.1.0";

} // namespace rtq
