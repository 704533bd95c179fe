#pragma once

#include <stdexcept>
#include <string>

namespace qualm {

/// Dimension or index-count mismatch between operands.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Requested object exceeds a configured size cap.
struct SizeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An input fails a contract check (normalization, completeness, ...).
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A Gram matrix is singular in the requested regime.
struct RankError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad experiment configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two supposedly equivalent computation routes disagree.
struct ConsistencyError : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace qualm
