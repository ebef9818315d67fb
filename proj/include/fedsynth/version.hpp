#pragma once

namespace fedsynth {

inline constexpr const char* kVersion = "fedsynth 0.1.0";

}  // namespace fedsynth
