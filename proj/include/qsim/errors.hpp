#pragma once

#include <stdexcept>
#include <string>

namespace qsim {

// Base for every error raised by the library. The CLI maps these onto exit
// codes, so each failure mode gets its own type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDirection : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

class NegativeWeight : public Error {
 public:
  using Error::Error;
};

class IncompleteTensor : public Error {
 public:
  using Error::Error;
};

class DecompositionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class EmptyTable : public Error {
 public:
  using Error::Error;
};

// Unmatched negative-sign rounds survived the removal step.
class ResidualNegativeEvents : public Error {
 public:
  ResidualNegativeEvents(std::size_t residual)
      : Error("removal left " + std::to_string(residual) + " unmatched negative-sign rounds"),
        residual_(residual) {}

  std::size_t residual() const noexcept { return residual_; }

 private:
  std::size_t residual_;
};

}  // namespace qsim
