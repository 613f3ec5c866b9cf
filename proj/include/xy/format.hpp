#pragma once

#include <charconv>
#include <stdexcept>
#include <string>

// Shortest-exact decimal formatting: the printed string parses back to the
// identical double, and equal doubles always print identically, which makes
// CSV output and hashes byte-stable.

namespace xy {

inline std::string formatShortest(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("double formatting failed");
    return std::string(buf, ptr);
}

}  // namespace xy
