#pragma once

#include <stdexcept>
#include <string>

namespace mfe {

// Base of every error the library raises. Analytic outcomes of a solve
// (divergence, stalling) are reported through SolveStatus instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BadParameter : public Error {
 public:
  using Error::Error;
};

class NoAdmissibleSubset : public Error {
 public:
  using Error::Error;
};

// A normalizing integral of exp(alpha v) is not representable.
class Overflow : public Error {
 public:
  using Error::Error;
};

class BadRadius : public Error {
 public:
  using Error::Error;
};

class OverlappingBalls : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

class NoBracket : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mfe
