#include "weaknoise/error.hpp"

namespace weaknoise {

Error::Error(std::string module, std::string parameter, const std::string& what)
    : std::runtime_error(module + (parameter.empty() ? "" : "." + parameter) + ": " + what),
      module_(std::move(module)),
      parameter_(std::move(parameter)) {}

void fail(const char* module, const char* parameter, const std::string& what) {
  throw Error(module, parameter, what);
}

}  // namespace weaknoise
