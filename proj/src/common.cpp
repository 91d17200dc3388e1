#include "common.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>

namespace parakkt {

std::string_view error_kind_name(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::internal: return "internal";
    case ErrorKind::config: return "config";
    case ErrorKind::hypothesis: return "hypothesis";
    case ErrorKind::solver: return "solver";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

void fail(ErrorKind kind, const std::string& message)
{
    throw Error(kind, message);
}

std::string format_roundtrip(double value)
{
    char buf[64];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, value);
        double back = 0.0;
        auto [ptr, ec] = std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
        if (ec == std::errc() && back == value)
            break;
    }
    return buf;
}

std::string format17(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

} // namespace parakkt
