#pragma once

namespace qet {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qet
