#include "featnoise/common.hpp"

#include <cstdio>

namespace featnoise {

std::string format_decimal(double v, int significant_digits) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    const double mag = std::abs(v);
    const int int_digits = static_cast<int>(std::floor(std::log10(mag))) + 1;
    int decimals = significant_digits - int_digits;
    if (decimals < 0) decimals = 0;
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

}  // namespace featnoise
