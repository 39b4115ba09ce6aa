#ifndef WAVEREC_VERSION_HPP
#define WAVEREC_VERSION_HPP

namespace waverec {
inline constexpr const char* kVersion = "0.1.0";
}

#endif
