#include "deforsc/util/numfmt.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace deforsc {

std::string fmt6(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";  // normalise -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

double round6(double x) {
    if (!std::isfinite(x)) return x;
    return std::strtod(fmt6(x).c_str(), nullptr);
}

std::string fmt_int(long long x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", x);
    return buf;
}

std::string fmt_exact(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace deforsc
