#pragma once

namespace isomush {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace isomush
