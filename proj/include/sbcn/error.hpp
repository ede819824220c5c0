#ifndef SBCN_ERROR_HPP
#define SBCN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sbcn {

enum class ErrorCode {
  parse,
  schema,
  io,
  invalid_argument,
  out_of_range,
  undefined_conditional,
  limit_exceeded,
};

// Base of every exception thrown by the library. The C API maps the code onto
// its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row, std::string column)
      : Error(ErrorCode::parse, what), row_(row), column_(std::move(column)) {}
  explicit ParseError(const std::string& what)
      : Error(ErrorCode::parse, what) {}
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_ = 0;
  std::string column_;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what) : Error(ErrorCode::schema, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCode::invalid_argument, what) {}
};

class IndexError : public Error {
 public:
  explicit IndexError(const std::string& what)
      : Error(ErrorCode::out_of_range, what) {}
};

class UndefinedConditional : public Error {
 public:
  explicit UndefinedConditional(const std::string& what)
      : Error(ErrorCode::undefined_conditional, what) {}
};

class LimitExceeded : public Error {
 public:
  explicit LimitExceeded(const std::string& what)
      : Error(ErrorCode::limit_exceeded, what) {}
};

}  // namespace sbcn

#endif
