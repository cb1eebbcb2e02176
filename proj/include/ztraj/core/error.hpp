#pragma once

#include <stdexcept>
#include <string>

namespace ztraj {

/// Base of all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mathematical precondition violated (zero polynomial height, division by zero, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

/// Input outside the supported exact domain (e.g. non Gaussian-rational poles).
class UnsupportedInput : public Error {
public:
    using Error::Error;
};

/// A numerical certificate could not be produced at the available precision.
class CertificationError : public Error {
public:
    using Error::Error;
};

} // namespace ztraj
