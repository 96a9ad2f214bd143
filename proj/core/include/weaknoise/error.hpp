#pragma once

#include <stdexcept>
#include <string>

namespace weaknoise {

/// Raised for contract violations: bad parameters, failed preconditions,
/// singular evaluation points. Carries the owning module and, when one
/// applies, the offending parameter so the CLI can report both.
class Error : public std::runtime_error {
 public:
  Error(std::string module, std::string parameter, const std::string& what);

  const std::string& module() const noexcept { return module_; }
  const std::string& parameter() const noexcept { return parameter_; }

 private:
  std::string module_;
  std::string parameter_;
};

[[noreturn]] void fail(const char* module, const char* parameter, const std::string& what);

}  // namespace weaknoise
