#pragma once

#include <stdexcept>
#include <string>

namespace pgreserve {

/// Failure categories. The CLI maps each one onto its process exit code.
enum class ErrorKind
{
  Validation = 2,
  Data = 3,
  Numerical = 4,
};

class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(what)
    , kind_(kind)
  {
  }

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
  ErrorKind kind_;
};

/// Bad parameters or a broken precondition on the caller's side.
class ValidationError : public Error
{
public:
  explicit ValidationError(const std::string& what)
    : Error(ErrorKind::Validation, what)
  {
  }
};

/// Input data that is malformed or insufficient for the requested fit.
class DataError : public Error
{
public:
  explicit DataError(const std::string& what)
    : Error(ErrorKind::Data, what)
  {
  }
};

/// Quadrature or linear-algebra failure.
class NumericalError : public Error
{
public:
  explicit NumericalError(const std::string& what)
    : Error(ErrorKind::Numerical, what)
  {
  }
};

} // namespace pgreserve
