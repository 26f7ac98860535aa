#pragma once

#include <stdexcept>
#include <string>

namespace csc {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Operand shapes disagree.
class DimensionError : public Error {
public:
  using Error::Error;
};

// Parameter outside its admissible range.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

// Malformed or unreadable file contents.
class FormatError : public Error {
public:
  using Error::Error;
};

// File system failure; message carries the offending path.
class IoError : public Error {
public:
  using Error::Error;
};

// A per-frequency system whose Sherman-Morrison denominator vanished.
class ConditioningError : public Error {
public:
  using Error::Error;
};

}  // namespace csc
