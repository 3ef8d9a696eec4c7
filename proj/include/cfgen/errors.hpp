#ifndef CFGEN_ERRORS_HPP
#define CFGEN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cfgen {

// Base class for every error raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// An instance, rationale set or record violates a structural invariant.
struct ValidationError : Error {
  using Error::Error;
};

// A token outside the scorer vocabulary was passed in.
struct UnknownTokenError : Error {
  using Error::Error;
};

// Transport-level failure of a remote backend call.
struct BackendUnavailableError : Error {
  BackendUnavailableError(const std::string& what, int attempts_made)
      : Error(what), attempts(attempts_made) {}
  int attempts = 0;
};

// The rationale extractor found no qualifying sentence.
struct EmptyRationaleError : Error {
  using Error::Error;
};

// No editing rule applies to the collected causal entities.
struct NoEditPossibleError : Error {
  using Error::Error;
};

// No entity tokenizes to a non-empty constraint phrase.
struct EmptyConstraintsError : Error {
  using Error::Error;
};

// Constrained search exhausted the length budget without a full hypothesis.
struct NoSatisfyingHypothesisError : Error {
  using Error::Error;
};

struct EmptyCandidatesError : Error {
  using Error::Error;
};

struct EmptyInputError : Error {
  using Error::Error;
};

// A class is too small for the NEI perturbation to be applied.
struct InsufficientDataError : Error {
  using Error::Error;
};

// Malformed dataset line; `line` is 1-based.
struct ParseError : Error {
  ParseError(const std::string& what, std::size_t line_number)
      : Error(what + " (line " + std::to_string(line_number) + ")"),
        line(line_number) {}
  std::size_t line = 0;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace cfgen

#endif  // CFGEN_ERRORS_HPP
