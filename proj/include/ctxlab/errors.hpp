#ifndef CTXLAB_ERRORS_HPP
#define CTXLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ctxlab {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file; line is 1-based, 0 when unknown.
struct ParseError : Error {
    int line;
    ParseError(int line_, const std::string& msg)
        : Error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
          line(line_) {}
};

// Invalid construction arguments or domain violations.
struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

// A configured size cap was exceeded. Never a silent truncation.
struct ResourceError : Error {
    explicit ResourceError(const std::string& msg) : Error(msg) {}
};

// A bisection family violated its documented monotonicity (the predicate has
// the same truth value at both ends of the parameter range).
struct NonMonotoneError : Error {
    explicit NonMonotoneError(const std::string& msg) : Error(msg) {}
};

// Internal invariant failed (verification of a witness/certificate, etc).
struct InternalError : Error {
    explicit InternalError(const std::string& msg) : Error(msg) {}
};

} // namespace ctxlab

#endif
