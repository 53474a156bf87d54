#pragma once

#include <stdexcept>
#include <string>

namespace homodyne {

// Base for every error raised by the library. Precondition failures,
// unphysical inputs and malformed networks all surface as subclasses.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AlgebraError : public Error {
 public:
  using Error::Error;
};

class NetworkError : public Error {
 public:
  using Error::Error;
};

class StateError : public Error {
 public:
  using Error::Error;
};

class SchemeError : public Error {
 public:
  using Error::Error;
};

class NoiseError : public Error {
 public:
  using Error::Error;
};

class OracleError : public Error {
 public:
  using Error::Error;
};

}  // namespace homodyne
