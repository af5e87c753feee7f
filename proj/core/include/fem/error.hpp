#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fem {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed selector or term string. `position` is the 0-based character offset.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t position)
        : Error(message + " (at position " + std::to_string(position) + ")"), position_(position) {}

    [[nodiscard]] std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Invalid mesh data: bad orientation, indices out of range, degenerate input.
class MeshError : public Error {
public:
    using Error::Error;
};

/// File format problem. `line` is 1-based, 0 when unknown.
class IoError : public Error {
public:
    IoError(const std::string& message, std::size_t line = 0)
        : Error(line == 0 ? message : message + " (line " + std::to_string(line) + ")"), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// The linear solver could not factor the (reduced) system.
class SolverError : public Error {
public:
    using Error::Error;
};

} // namespace fem
