#pragma once

#include <stdexcept>
#include <string>

namespace pll {

// Invalid experiment configuration: unknown field, bad value, missing path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent dataset (file or in-memory).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite loss or gradient encountered during training.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, long example_index)
      : std::runtime_error(what), example_index_(example_index) {}

  // Index of the offending example within its batch, or -1 when the
  // failure is only attributable to the accumulated batch.
  long example_index() const { return example_index_; }

 private:
  long example_index_;
};

}  // namespace pll
