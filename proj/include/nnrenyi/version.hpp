#pragma once

namespace nnrenyi {
inline constexpr const char* kToolVersion = "0.3.0";
}
