#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace decseq {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rejected input; `path` names the offending field when known.
class ValidationError : public Error {
 public:
  ValidationError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class UnreadableInput : public Error {
 public:
  using Error::Error;
};

class ImpossibleObservation : public Error {
 public:
  using Error::Error;
};

class UnreachableMessage : public Error {
 public:
  using Error::Error;
};

class StructureViolation : public Error {
 public:
  using Error::Error;
};

class CapExceeded : public Error {
 public:
  CapExceeded(std::uint64_t estimate, std::uint64_t cap)
      : Error("enumeration cap exceeded: estimated " + std::to_string(estimate) +
              " evaluations, cap " + std::to_string(cap)),
        estimate_(estimate) {}
  std::uint64_t estimate() const noexcept { return estimate_; }

 private:
  std::uint64_t estimate_;
};

class UnattainableEpsilon : public Error {
 public:
  UnattainableEpsilon(double best, int max_horizon)
      : Error("requested epsilon not certified up to horizon " + std::to_string(max_horizon) +
              "; best bound " + std::to_string(best)),
        best_(best) {}
  double best_bound() const noexcept { return best_; }

 private:
  double best_;
};

}  // namespace decseq
