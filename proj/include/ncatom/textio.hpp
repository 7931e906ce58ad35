#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace ncatom {

/// Scientific notation with a fixed significant-digit count; C-locale digits
/// only, so emitted files are byte-stable across environments.
inline std::string format_significant(double v, int digits = 12) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, v);
    return buf;
}

/// Value rounded to the emitted text precision (keeps JSON numbers identical
/// to their CSV counterparts).
inline double round_significant(double v, int digits = 12) {
    return std::strtod(format_significant(v, digits).c_str(), nullptr);
}

}  // namespace ncatom
