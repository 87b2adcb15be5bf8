#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cantor {

/// Malformed input text: spec strings, files, command-line values.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A well-formed request that the mathematics refuses: length mismatches,
/// non-prefix-free sets, horizon overruns, divergence at desk scale.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class HorizonError : public DomainError {
 public:
  HorizonError(std::uint64_t stage, std::uint64_t horizon)
      : DomainError("stage " + std::to_string(stage) + " beyond horizon " +
                    std::to_string(horizon)),
        stage_(stage),
        horizon_(horizon) {}

  std::uint64_t stage() const noexcept { return stage_; }
  std::uint64_t horizon() const noexcept { return horizon_; }

 private:
  std::uint64_t stage_;
  std::uint64_t horizon_;
};

class PrefixError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Raised by evaluate() when an output bit cannot be produced: the evaluator
/// diverges, or its step budget runs out first.
class DivergenceError : public DomainError {
 public:
  DivergenceError(std::uint64_t index, const std::string& why)
      : DomainError("divergence at desk scale: output bit " +
                    std::to_string(index) + " undefined (" + why + ")"),
        index_(index) {}

  std::uint64_t index() const noexcept { return index_; }

 private:
  std::uint64_t index_;
};

}  // namespace cantor
