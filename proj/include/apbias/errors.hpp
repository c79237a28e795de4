// Error taxonomy shared by the library and the CLI exit-code mapping:
//   ConfigError    -> exit 2 (bad arguments / preconditions)
//   NumericalError -> exit 3 (consistency or branch-resolution failure)
//   ResourceError  -> exit 4 (memory / enumeration guards)

#pragma once
#include <stdexcept>
#include <string>

namespace apbias {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace apbias
