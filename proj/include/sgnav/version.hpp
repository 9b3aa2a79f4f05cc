#pragma once

namespace sgnav {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sgnav
