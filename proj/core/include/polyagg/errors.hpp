#pragma once

#include <stdexcept>
#include <string>

namespace polyagg {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input data: malformed files, bad indices, out-of-range parameters.
class InputError : public Error {
public:
    using Error::Error;
};

/// Degenerate or non-simple geometry.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Mesh validation failure attributable to one cell (cell == -1 when not cell specific).
class MeshError : public InputError {
public:
    MeshError(const std::string& what, int cell = -1) : InputError(what), cell_(cell) {}
    int cell() const { return cell_; }

private:
    int cell_;
};

/// Text-format parse failure at a given 1-based line.
class ParseError : public InputError {
public:
    ParseError(const std::string& what, int line)
        : InputError("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    int line() const { return line_; }

private:
    int line_;
};

/// Numerical breakdown: singular local matrices, failed factorizations.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace polyagg
