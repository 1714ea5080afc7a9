#pragma once

#include <stdexcept>
#include <string>

namespace pecep {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidInputError : Error {
  using Error::Error;
};

struct InvalidConfigError : Error {
  using Error::Error;
};

struct InvalidCovarianceError : Error {
  using Error::Error;
};

struct InsufficientSamplesError : Error {
  using Error::Error;
};

struct InsufficientDataError : Error {
  using Error::Error;
};

struct SingularMatrixError : Error {
  using Error::Error;
};

struct UnderdeterminedSystemError : Error {
  using Error::Error;
};

struct UnstableProcessError : Error {
  using Error::Error;
};

struct DivergenceError : Error {
  using Error::Error;
};

struct DegenerateSpectrumError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace pecep
