#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace parakkt {

/// Error classes. The numeric values double as CLI exit codes.
enum class ErrorKind {
    internal = 1,
    config = 2,
    hypothesis = 3,
    solver = 4,
    io = 5,
};

std::string_view error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

/// Shortest decimal text that parses back to exactly the same double
/// (at most 17 significant digits).
std::string format_roundtrip(double value);

/// Fixed 17-significant-digit rendering used by every on-disk artifact.
std::string format17(double value);

} // namespace parakkt
