#pragma once

#include <stdexcept>
#include <string>

namespace atlas {

// Invalid input or a request outside the model's admissible range.
// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical method failed to converge or produced an inadmissible state.
// The CLI maps this to exit code 3.
class SolverFailure : public std::runtime_error {
public:
    explicit SolverFailure(const std::string& what) : std::runtime_error(what) {}
};

} // namespace atlas
