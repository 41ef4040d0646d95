#pragma once

#include <stdexcept>
#include <string>

namespace maximin {

// Error taxonomy shared by every module. Each kind maps to one failure mode
// callers may want to distinguish (bad argument vs. instance too large, etc).

class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

class IndexError : public std::out_of_range {
 public:
  explicit IndexError(const std::string& what) : std::out_of_range(what) {}
};

class CapacityError : public std::length_error {
 public:
  explicit CapacityError(const std::string& what) : std::length_error(what) {}
};

class PrecisionError : public std::runtime_error {
 public:
  explicit PrecisionError(const std::string& what) : std::runtime_error(what) {}
};

// Caller broke an input contract that is not a simple range check, e.g. a
// model that does not belong to the tree class a learner was built for.
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

// gamma = 0 at the requested accuracy; no finite query budget suffices.
class UnlearnableError : public std::runtime_error {
 public:
  explicit UnlearnableError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace maximin
