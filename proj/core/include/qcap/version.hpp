#pragma once

namespace qcap {

inline constexpr const char* kVersion = "0.1.0";

} // namespace qcap
