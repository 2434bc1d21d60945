#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace msst {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inverting a point that coincides with the center of inversion.
class PoleInversion : public Error {
public:
    using Error::Error;
};

/// A ball whose radius is (numerically) zero has no halfspace image.
class DegenerateBall : public Error {
public:
    using Error::Error;
};

/// Querying an exclusion tree with its own pole.
class PoleQuery : public Error {
public:
    using Error::Error;
};

/// Malformed input text.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Input that parses but violates an instance invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Two input points coincide within tolerance.
class DuplicatePoints : public ValidationError {
public:
    DuplicatePoints(const std::string& what, std::size_t first, std::size_t second)
        : ValidationError(what), first_(first), second_(second) {}

    std::size_t first() const { return first_; }
    std::size_t second() const { return second_; }

private:
    std::size_t first_;
    std::size_t second_;
};

} // namespace msst
