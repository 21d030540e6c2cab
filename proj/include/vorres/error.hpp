#pragma once

#include <stdexcept>
#include <string>

namespace vorres {

// Raised for bad input data: malformed files, invalid point patterns,
// out-of-range parameters. The CLI maps it to exit status 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public DataError {
 public:
  ParameterError(std::string name, const std::string& what)
      : DataError("parameter '" + name + "': " + what), name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

}  // namespace vorres
