#pragma once

#include <stdexcept>
#include <string>

namespace segkit {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A referenced file is missing or cannot be decoded.
class LoadError : public Error {
  public:
    using Error::Error;
};

/// Decoded data violates a data-model invariant.
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// An operation was called outside its preconditions.
class ArgumentError : public Error {
  public:
    using Error::Error;
};

class GenerationError : public Error {
  public:
    using Error::Error;
};

} // namespace segkit
