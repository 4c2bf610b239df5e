#pragma once

#include <stdexcept>
#include <string>

namespace uwe {

// Error taxonomy mirrors the CLI exit-code table:
//   IoError -> 2, ModeError -> 3, ShapeError/ConfigError -> 4, FormatError -> 5.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Inconsistent structure: channel counts, layer plans, branch geometry.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Dimension problems: mismatched tensors, non-positive output sizes,
// inputs too small for an operator.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Train/inference mode misuse (converting twice, benchmarking train weights).
class ModeError : public Error {
public:
    using Error::Error;
};

// Filesystem-level failures: missing or unreadable/unwritable paths.
class IoError : public Error {
public:
    using Error::Error;
};

// Malformed file contents: bad magic, version, truncation, manifest mismatch.
class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace uwe
