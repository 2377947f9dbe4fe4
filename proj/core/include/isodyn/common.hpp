#ifndef ISODYN_COMMON_HPP
#define ISODYN_COMMON_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace isodyn {

/// Open interval (lo, hi).
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double diam() const { return hi - lo; }
    bool contains(double x) const { return x > lo && x < hi; }
};

/// Input could not be parsed (expression source, spec files).
/// `position` is a 0-based offset into the input.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t pos, std::string expected_tok)
        : std::runtime_error(msg), position(pos), expected(std::move(expected_tok)) {}

    std::size_t position;
    std::string expected;
};

/// A model or operation precondition does not hold.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numerical procedure failed to reach its tolerance.
class NumericsError : public std::runtime_error {
public:
    explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace isodyn

#endif
