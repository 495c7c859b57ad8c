#pragma once

#include <stdexcept>
#include <string>

namespace vocabtrend {

/// Bad or missing input: files, formats, out-of-range arguments.
/// The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite values or other arithmetic breakdown. CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vocabtrend
