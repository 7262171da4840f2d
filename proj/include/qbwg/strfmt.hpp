#ifndef QBWG_STRFMT_HPP
#define QBWG_STRFMT_HPP

#include <cstdio>
#include <string>

namespace qbwg {

// printf-style string formatting (the toolchain lacks <format>).
template <class... Args>
std::string strfmt(const char* fmt, Args... args) {
    const int n = std::snprintf(nullptr, 0, fmt, args...);
    std::string s(n > 0 ? static_cast<std::size_t>(n) : 0, '\0');
    if (n > 0) std::snprintf(s.data(), s.size() + 1, fmt, args...);
    return s;
}

}  // namespace qbwg

#endif
