#ifndef STOCHKIN_VERSION_HPP
#define STOCHKIN_VERSION_HPP

namespace stochkin {

inline constexpr const char* kToolName = "stochkin";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace stochkin

#endif
