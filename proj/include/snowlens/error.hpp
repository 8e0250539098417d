#pragma once

#include <stdexcept>
#include <string>

namespace snowlens {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raster or tensor shapes that do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Argument outside its documented domain (class index, fraction, config field).
class ValueError : public Error {
 public:
  using Error::Error;
};

// File contents that cannot be decoded or do not match the expected schema.
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace snowlens
