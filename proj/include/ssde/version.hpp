#pragma once

namespace ssde {
inline constexpr const char* kVersion = "0.1.0";
}
