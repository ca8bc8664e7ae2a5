#pragma once

namespace persuade {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace persuade
