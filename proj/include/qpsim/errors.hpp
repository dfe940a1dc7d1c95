#pragma once

#include <stdexcept>
#include <string>

namespace qpsim {

/// Invalid configuration or out-of-domain argument.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Vectors or matrices whose shapes do not agree.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An estimator was handed too few usable samples.
class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical routine (LP, quadrature, factorization) failed to produce an answer.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qpsim
