#pragma once

#include <stdexcept>
#include <string>

namespace folint {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: out-of-range indices, mismatched sizes, bad options.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Evaluation left the domain of an elementary function or divided by zero.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// Lexical or syntactic error in an expression, carrying the byte offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), message_(message), offset_(offset) {}
  std::size_t offset() const { return offset_; }
  const std::string& message() const { return message_; }

 private:
  std::string message_;
  std::size_t offset_;
};

/// A metric or structure failed validation (not positive definite, not periodic, ...).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Spanning vectors became (numerically) linearly dependent.
class DegeneracyError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// Two routes to the same quantity disagreed beyond tolerance.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace folint

namespace folint {

/// Inside a catch block: rethrow the active error with `context` appended,
/// keeping its category.
[[noreturn]] inline void rethrow_with_context(const std::string& context) {
  try {
    throw;
  } catch (const ParseError& e) {
    throw ParseError(e.message() + " [" + context + "]", e.offset());
  } catch (const DegeneracyError& e) {
    throw DegeneracyError(std::string(e.what()) + " [" + context + "]");
  } catch (const GeometryError& e) {
    throw GeometryError(std::string(e.what()) + " [" + context + "]");
  } catch (const SingularityError& e) {
    throw SingularityError(std::string(e.what()) + " [" + context + "]");
  } catch (const ConsistencyError& e) {
    throw ConsistencyError(std::string(e.what()) + " [" + context + "]");
  } catch (const InputError& e) {
    throw InputError(std::string(e.what()) + " [" + context + "]");
  } catch (const Error& e) {
    throw Error(std::string(e.what()) + " [" + context + "]");
  }
}

}  // namespace folint
