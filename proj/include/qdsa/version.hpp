#pragma once

namespace qdsa {

inline constexpr const char* kVersion = "0.1.0";

} // namespace qdsa
