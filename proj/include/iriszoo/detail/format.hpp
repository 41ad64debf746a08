// Copyright the iriszoo authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <charconv>
#include <string>

namespace iriszoo::detail {

/// Shortest decimal form that parses back to exactly the same double.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace iriszoo::detail
