#pragma once

#include <stdexcept>
#include <string>

namespace cmdpsim {

// Raised when an input file or argument violates a documented invariant.
// The CLI maps this to exit code 1; other exceptions map to exit code 2.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when rejection sampling gives up before meeting the requested flags.
struct GenerationError : std::runtime_error {
    explicit GenerationError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cmdpsim
