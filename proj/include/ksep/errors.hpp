#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ksep {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated precondition of a library operation (bad arity, unbound variable, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at offset " + std::to_string(position)), position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// An enumeration would exceed the configured interpretation ceiling.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// A construction produced something that failed its own verification.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace ksep
