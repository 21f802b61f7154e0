#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tvpf {

// Bad argument or inconsistent configuration. The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A file or directory could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The implicit stepping matrix could not be factorized.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every particle weight underflowed (or went non-finite) during a filter step.
class DegenerateWeightsError : public std::runtime_error {
 public:
  explicit DegenerateWeightsError(std::size_t step)
      : std::runtime_error("all particle weights degenerate at step " +
                           std::to_string(step)),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace tvpf
