#pragma once

namespace gmsphere {
inline constexpr const char* kVersion = "0.1.0";
}
