#ifndef RHORAW_ERROR_HPP_
#define RHORAW_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace rhoraw {

// Base class for every data-level failure raised by the library. The CLI maps
// these to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidMetadata : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class DegeneratePair : public Error {
 public:
  using Error::Error;
};

class OrderingViolation : public Error {
 public:
  using Error::Error;
};

class CorruptInput : public Error {
 public:
  using Error::Error;
};

}  // namespace rhoraw

#endif  // RHORAW_ERROR_HPP_
