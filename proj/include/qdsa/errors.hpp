#pragma once

#include <stdexcept>

namespace qdsa {

// Invalid build-time configuration: bad sizes, out-of-range constants,
// malformed config files. CLI maps this to exit code 1.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid call at runtime: bad indices, shape mismatches, non-finite inputs.
// CLI maps this (and I/O failures) to exit code 2.
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace qdsa
