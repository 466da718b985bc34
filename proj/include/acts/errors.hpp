#pragma once

#include <stdexcept>
#include <string>

namespace acts {

/// Malformed input text (CSV, config, checkpoint).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Well-formed input whose content violates a data invariant.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration or argument values that cannot be used.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tensor dimensions that do not line up.
class ShapeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An API called in a state where it cannot proceed.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Missing or unreadable/unwritable files.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss or parameter.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace acts
