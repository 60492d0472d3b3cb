#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace peg {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

class MalformedNumber : public Error {
 public:
  using Error::Error;
};

class CsvError : public Error {
 public:
  using Error::Error;
};

class ConfigParseError : public Error {
 public:
  using Error::Error;
};

class ConfigValidationError : public Error {
 public:
  using Error::Error;
};

class MissingRequiredCell : public Error {
 public:
  MissingRequiredCell(std::size_t row, std::string column)
      : Error("missing required cell at row " + std::to_string(row) +
              ", column '" + column + "'"),
        row_(row),
        column_(std::move(column)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

class DuplicatePrimaryKey : public Error {
 public:
  using Error::Error;
};

class InvalidLiteral : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// N-Triples syntax error; line() is 1-based.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnknownNamespace : public Error {
 public:
  using Error::Error;
};

class CrossPatientComparison : public Error {
 public:
  using Error::Error;
};

class InconsistentEdges : public Error {
 public:
  using Error::Error;
};

class DegenerateLabels : public Error {
 public:
  using Error::Error;
};

// Query text error; position() is a 0-based byte offset into the query.
class QuerySyntaxError : public Error {
 public:
  QuerySyntaxError(std::size_t position, const std::string& what)
      : Error("position " + std::to_string(position) + ": " + what),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class UnboundSelectVariable : public Error {
 public:
  using Error::Error;
};

class DisconnectedPattern : public Error {
 public:
  using Error::Error;
};

// Wraps a failure from one pipeline stage with the stage name.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace peg
