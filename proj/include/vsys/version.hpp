#pragma once

namespace vsys {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace vsys
