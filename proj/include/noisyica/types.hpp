#ifndef NOISYICA_TYPES_HPP
#define NOISYICA_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace noisyica {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Array = Eigen::ArrayXd;
using Index = Eigen::Index;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad argument values (dimensions, parameter ranges, non-finite input).
struct InvalidInputError : Error {
    using Error::Error;
};

// Operation needs more rows than the dataset has.
struct InsufficientDataError : Error {
    using Error::Error;
};

// Empirical characteristic-function modulus fell below the guard floor.
struct DegenerateDirectionError : Error {
    using Error::Error;
};

// Moment-generating-function exponent left the representable range.
struct CgfOverflowError : Error {
    using Error::Error;
};

// Power-iteration gradient vanished; caller should restart.
struct DegenerateGradientError : Error {
    using Error::Error;
};

// Every probe of a Monte-Carlo estimate failed.
struct EstimationFailureError : Error {
    using Error::Error;
};

// Matrix does not have the full rank the metric requires.
struct RankError : Error {
    using Error::Error;
};

// Every candidate of a meta run failed.
struct MetaFailureError : Error {
    using Error::Error;
};

// Malformed experiment or model configuration.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace noisyica

#endif // NOISYICA_TYPES_HPP
