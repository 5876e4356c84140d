#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace mmv::csv {

/// 17 significant digits; NaN prints as an empty field.
inline std::string num(double v) {
    if (std::isnan(v)) {
        return {};
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string join(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) {
            out += ',';
        }
        out += fields[i];
    }
    return out;
}

} // namespace mmv::csv
