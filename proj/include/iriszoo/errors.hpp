// Copyright the iriszoo authors. Licensed under the Apache 2.0 license. See LICENSE in the project root.
#pragma once

#include <stdexcept>
#include <string>

namespace iriszoo {

/// Filesystem failures: missing inputs, unwritable outputs.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Structurally broken input files: bad JSON, bad hex, inconsistent headers.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A call whose stated preconditions do not hold (invalid parameter ranges,
/// mismatched dimensions, missing overlap, ...).
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace iriszoo
