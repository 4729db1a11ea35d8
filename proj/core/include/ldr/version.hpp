#pragma once

namespace ldr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ldr
