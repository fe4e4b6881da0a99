#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>

namespace acrlab {

/// Rate-constant name -> value.
using Bindings = std::map<std::string, double>;

/// Base class for everything this library throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Syntax error in a time-expression, with a byte offset into the input.
struct ExprParseError : Error {
    std::size_t offset;
    ExprParseError(const std::string& msg, std::size_t off)
        : Error(msg + " (at byte " + std::to_string(off) + ")"), offset(off) {}
};

/// Syntax or validation error in the network DSL, with line/column (1-based).
struct NetParseError : Error {
    int line, column;
    NetParseError(const std::string& msg, int ln, int col)
        : Error(msg + " (line " + std::to_string(ln) + ", column " + std::to_string(col) + ")"),
          line(ln), column(col) {}
};

struct EvalError : Error {
    using Error::Error;
};

/// Value exceeded the double range; caller should switch to the log-domain path.
struct OverflowError : Error {
    using Error::Error;
};

struct UnboundParamError : Error {
    using Error::Error;
};

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Fixed 17-significant-digit form used by the CSV trajectory schema.
/// to_chars keeps it locale-independent.
inline std::string format_double17(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

/// Short display form for tables and report strings.
inline std::string format_double6(double v) {
    char buf[32];
    int n = std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::string(buf, buf + n);
}

template <typename Real = double>
inline Real pow_int(Real x, int e) {
    if (e < 0) return Real(1) / pow_int(x, -e);
    Real r(1);
    while (e > 0) {
        if (e & 1) r *= x;
        x *= x;
        e >>= 1;
    }
    return r;
}

}  // namespace acrlab
