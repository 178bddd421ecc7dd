// errors.hpp — Exception types shared across the library

#pragma once

#include <stdexcept>
#include <string>

namespace xxness {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Validation-type errors (CLI exit code 1).
class InvalidSizeError : public Error {
public:
    using Error::Error;
};

class InvalidParameterError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class PlanError : public Error {
public:
    using Error::Error;
};

class CapacityError : public Error {
public:
    using Error::Error;
};

class SymmetryError : public Error {
public:
    using Error::Error;
};

// Numeric-type errors (CLI exit code 2).
class NumericError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class FitError : public Error {
public:
    using Error::Error;
};

// Chain spectrum extends to or below zero total energy x_0 + Delta.
class GapError : public Error {
public:
    GapError(const std::string& what, double offending_energy)
        : Error(what), offending_energy_(offending_energy) {}
    double offending_energy() const { return offending_energy_; }

private:
    double offending_energy_;
};

} // namespace xxness
