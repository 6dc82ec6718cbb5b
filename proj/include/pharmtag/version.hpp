#pragma once

namespace pharmtag {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pharmtag
