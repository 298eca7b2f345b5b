#pragma once

#include <stdexcept>
#include <string>

namespace dynbit {

// Simulation would exceed its event/bit budget.
struct BudgetError : std::runtime_error {
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dynbit
