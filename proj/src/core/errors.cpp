#include "msc/core/errors.hpp"

#include <sstream>

namespace msc {

namespace {

std::string locate(const std::string& message, std::size_t line, std::size_t offset) {
  std::ostringstream os;
  os << message << " (";
  if (line > 0) os << "line " << line << ", ";
  os << "byte " << offset << ")";
  return os.str();
}

std::string budget_message(double product, double budget) {
  std::ostringstream os;
  os << "exhaustive search refused: " << product << " compositions exceed the budget of "
     << budget;
  return os.str();
}

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t offset)
    : std::runtime_error(locate(message, line, offset)), line_(line), offset_(offset) {}

OutOfBoundsError::OutOfBoundsError(const std::string& message, std::string segment)
    : std::runtime_error(message), segment_(std::move(segment)) {}

BudgetExceeded::BudgetExceeded(double product, double budget)
    : std::runtime_error(budget_message(product, budget)), product_(product), budget_(budget) {}

}  // namespace msc
