#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace propest {

/// Broad failure category; the CLI maps each to an exit code.
enum class ErrorCategory {
  validation,  // bad input, design, or population shape
  numerical,   // division by zero, domain, singular system
  resource,    // enumeration too large
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

#define PROPEST_DEFINE_ERROR(Name, Category)                   \
  class Name : public Error {                                  \
   public:                                                     \
    explicit Name(const std::string& what)                     \
        : Error(ErrorCategory::Category, #Name ": " + what) {} \
  }

PROPEST_DEFINE_ERROR(EmptyPopulation, validation);
PROPEST_DEFINE_ERROR(DegeneratePopulation, validation);
PROPEST_DEFINE_ERROR(EmptySample, validation);
PROPEST_DEFINE_ERROR(InvalidDesign, validation);
PROPEST_DEFINE_ERROR(ValidationError, validation);
PROPEST_DEFINE_ERROR(UnreachableTarget, validation);
PROPEST_DEFINE_ERROR(UndefinedDeviation, numerical);
PROPEST_DEFINE_ERROR(DivisionByZero, numerical);
PROPEST_DEFINE_ERROR(DomainError, numerical);
PROPEST_DEFINE_ERROR(DegenerateAuxiliary, numerical);
PROPEST_DEFINE_ERROR(SingularSystem, numerical);
PROPEST_DEFINE_ERROR(TooManySamples, resource);
PROPEST_DEFINE_ERROR(IoError, io);

#undef PROPEST_DEFINE_ERROR

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(ErrorCategory::validation,
              "ParseError: " + (line > 0 ? "line " + std::to_string(line) + ": " : std::string{}) + what),
        line_(line) {}

  /// 1-based line number, 0 when the error is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// An estimator failed inside a simulation replicate or an enumerated subset.
class EstimatorDomainError : public Error {
 public:
  EstimatorDomainError(const std::string& what, std::size_t replicate,
                       std::vector<std::size_t> subset)
      : Error(ErrorCategory::numerical, describe(what, replicate, subset)),
        replicate_(replicate),
        subset_(std::move(subset)) {}

  std::size_t replicate() const noexcept { return replicate_; }
  /// Population indices of the offending sample.
  const std::vector<std::size_t>& subset() const noexcept { return subset_; }

 private:
  static std::string describe(const std::string& what, std::size_t replicate,
                              const std::vector<std::size_t>& subset) {
    std::string s = "EstimatorDomainError at sample " + std::to_string(replicate) + " {";
    for (std::size_t i = 0; i < subset.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(subset[i]);
    }
    return s + "}: " + what;
  }

  std::size_t replicate_;
  std::vector<std::size_t> subset_;
};

}  // namespace propest
