#pragma once

namespace bivexp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bivexp
