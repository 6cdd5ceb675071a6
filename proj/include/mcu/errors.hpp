#ifndef MCU_ERRORS_HPP
#define MCU_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace mcu {

// Exit-code mapping used by the CLI: InvalidArgumentError -> 1,
// DataError (and subclasses) -> 2, NumericalError (and subclasses) -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

class ParseError : public DataError {
 public:
  using DataError::DataError;
};

class CorruptionError : public DataError {
 public:
  using DataError::DataError;
};

class UnsupportedVersionError : public DataError {
 public:
  using DataError::DataError;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class InitializationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, std::vector<double> last_finite)
      : NumericalError(what), last_finite_iterate(std::move(last_finite)) {}
  std::vector<double> last_finite_iterate;
};

}  // namespace mcu

#endif
