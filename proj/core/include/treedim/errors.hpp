#pragma once

#include <stdexcept>
#include <string>

namespace treedim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegreeMismatch : public Error {
 public:
  using Error::Error;
};

/// A computation exceeded a configured cap (points, nodes, levels).
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

class LevelMismatch : public Error {
 public:
  using Error::Error;
};

class StateExplosion : public ResourceLimit {
 public:
  using ResourceLimit::ResourceLimit;
};

class NotSubgroup : public Error {
 public:
  using Error::Error;
};

class NotTransitive : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace treedim
