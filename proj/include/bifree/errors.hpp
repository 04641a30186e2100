#pragma once

#include <stdexcept>
#include <string>

namespace bifree {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Evaluation point coincides with an atom of the measure.
struct PoleAtArgument : Error {
    using Error::Error;
};

struct NoConvergence : Error {
    int iterations;
    double residual;
    NoConvergence(int iters, double res)
        : Error("fixed-point iteration did not converge after " + std::to_string(iters) +
                " iterations (residual " + std::to_string(res) + ")"),
          iterations(iters), residual(res) {}
};

/// An iterate left the upper half-plane; the map is a C+ self-map, so this
/// signals a numerical fault rather than a mathematical one.
struct LeftHalfPlaneEscape : Error {
    using Error::Error;
};

struct InvalidTime : Error {
    using Error::Error;
};

struct DenominatorNearZero : Error {
    using Error::Error;
};

struct RegionNotSupported : Error {
    using Error::Error;
};

struct InconsistentAtom : Error {
    using Error::Error;
};

struct NonInvertible : Error {
    using Error::Error;
};

struct CapExceeded : Error {
    using Error::Error;
};

struct SchemaError : Error {
    using Error::Error;
};

} // namespace bifree
