#pragma once

#include <stdexcept>
#include <string>

namespace namekit {

// Source text could not be scanned into classes/methods. Carries the 1-based
// position of the first offending token.
struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(const std::string& msg, int line_, int column_)
        : std::runtime_error(msg + " (line " + std::to_string(line_) + ", col " +
                             std::to_string(column_) + ")"),
          line(line_),
          column(column_) {}
};

// Raised when an operation needs data the corpus cannot provide, e.g. training
// a vocabulary from zero usable sub-tokens.
struct DegenerateCorpus : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tensor shapes disagree with the configuration they were built from.
struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Attention was asked to pool over a memory in which every position is padding.
struct AllMasked : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Training produced a NaN/inf loss; the run is aborted rather than continued.
struct NonFiniteLoss : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A method name reduced to zero sub-tokens, so set metrics are undefined on it.
struct EmptyName : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad flags, bad config file, or inconsistent option combinations. The CLI
// maps this to exit code 2; everything else fatal maps to 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem trouble: unreadable input, unwritable output, truncated checkpoint.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace namekit
