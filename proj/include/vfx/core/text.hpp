#pragma once

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace vfx {

/// Decimal with 9 significant digits. Every numeric text format uses it.
inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::vector<std::string> split_ws(std::string_view line);
std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace vfx
