#pragma once

#include <stdexcept>
#include <string>

namespace qiforest {

// Thrown when caller-supplied arguments violate an operation's contract
// (dimension mismatches, out-of-range parameters, non-finite values).
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when the data itself admits no meaningful answer (all-zero
// spectra, constant targets).
struct DegenerateData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File-level failures: unreadable paths, unwritable outputs.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qiforest
