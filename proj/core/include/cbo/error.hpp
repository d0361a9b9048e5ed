#ifndef CBO_ERROR_HPP_
#define CBO_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cbo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an input violates a documented invariant or precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed file content. Carries the 1-based line and the offending field.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, std::string field, const std::string& what);

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::string source_;
  std::size_t line_;
  std::string field_;
};

}  // namespace cbo

#endif  // CBO_ERROR_HPP_
