#pragma once

#include <stdexcept>
#include <string>

namespace obt {

// Generic failure inside the library (geometry preconditions, solver state, ...).
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad user input: malformed problem files, invalid obstacles, atoms inside the
// obstacle. The CLI maps this to exit code 2, everything else to 3.
struct InputError : Error {
    explicit InputError(const std::string& what) : Error(what) {}
};

} // namespace obt
