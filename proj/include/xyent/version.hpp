#pragma once

namespace xyent {
inline constexpr const char* version = "0.1.0";
}
