#pragma once

namespace wfp {

inline constexpr const char* kToolName = "wfpkit";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace wfp
