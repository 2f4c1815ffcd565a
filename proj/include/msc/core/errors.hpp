#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace msc {

// Caller broke an operation's precondition (kind mismatch, bad index, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Inconsistent or invalid configuration content.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. Carries a 1-based line (0 when unknown) and a byte offset.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t offset);

  std::size_t line() const noexcept { return line_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

// A geometric construction left the voxel grid.
class OutOfBoundsError : public std::runtime_error {
 public:
  OutOfBoundsError(const std::string& message, std::string segment);

  const std::string& segment() const noexcept { return segment_; }

 private:
  std::string segment_;
};

// Exhaustive enumeration refused because the composition count is too large.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(double product, double budget);

  double product() const noexcept { return product_; }
  double budget() const noexcept { return budget_; }

 private:
  double product_;
  double budget_;
};

}  // namespace msc
