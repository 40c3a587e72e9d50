#pragma once

#include <stdexcept>
#include <string>

namespace perfect {

/// Invalid argument to a constructor or sampler (nonpositive scale, empty input, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a map (negative scale point, zero density).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The model itself is unusable: disconnected site, singular precision, bad file.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An inverse-density evaluation failed; carries the offending level.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double level)
      : std::runtime_error(what + " (y = " + std::to_string(level) + ")"), level_(level) {}

  double level() const noexcept { return level_; }

 private:
  double level_;
};

/// CFTP gave up before coalescence. Never paired with a returned state.
class NonCoalescenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace perfect
