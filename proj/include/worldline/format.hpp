#pragma once

#include <array>
#include <charconv>
#include <string>

namespace worldline {

// Shortest decimal form that parses back to the identical double. Used for
// every number the library or CLI emits, so reruns are byte-identical.
inline std::string format_double(double v) {
    std::array<char, 40> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), end);
}

}  // namespace worldline
