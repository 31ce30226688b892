#pragma once

#include <stdexcept>
#include <string>

namespace sopeval {

/// Base exception for every pipeline failure. The message is prefixed with
/// the module that raised it, e.g. "corpus: duplicate id 's1'".
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& message)
      : std::runtime_error(module + ": " + message), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

/// A required input file or resource is missing or unreadable.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace sopeval
