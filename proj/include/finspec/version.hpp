#pragma once

namespace finspec {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace finspec
