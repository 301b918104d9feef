// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace dqcr {

// Caller broke a documented precondition (deleting a non-frontier gate,
// stepping an inadmissible action, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed user input: out-of-range qubit, bad file, invalid config.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A primitive operation whose physical preconditions do not hold in the
// current state (busy qubit, missing EPR pair, ...).
class InfeasibleOperation : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

}  // namespace dqcr
