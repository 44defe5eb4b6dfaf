#ifndef TMBOSON_VERSION_HPP
#define TMBOSON_VERSION_HPP

namespace tmb {

inline constexpr const char* kToolName = "tmboson";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace tmb

#endif
