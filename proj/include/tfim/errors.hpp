#pragma once

#include <stdexcept>
#include <string>

namespace tfim {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad arguments or configuration (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Symmetry machinery asked for on a lattice that does not carry it.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

// Eigensolver failure, non-PSD input, dt halving exhausted (CLI exit code 3).
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace tfim
