#ifndef SPACELIKE_ERRORS_HPP
#define SPACELIKE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spacelike {

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Input plane is not space-like (Gram matrix fails positive definiteness).
struct DegeneratePlaneError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A frame completion vector came out too close to the light cone.
struct FrameDegeneracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Induced metric of a graph failed positive definiteness at a point.
struct NotSpacelikeError : std::runtime_error {
    double offending_eigenvalue;
    explicit NotSpacelikeError(const std::string& what, double eig)
        : std::runtime_error(what), offending_eigenvalue(eig) {}
};

/// W^T W eigenvalue below 1 beyond tolerance in the Grassmannian algebra.
struct NumericalDegeneracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A finite-difference stencil or chart lookup left the valid chart window.
struct ChartError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Adaptive step-size collapse; carries the last arclength reached.
struct IntegrationFailure : std::runtime_error {
    double last_good_s;
    explicit IntegrationFailure(const std::string& what, double s)
        : std::runtime_error(what), last_good_s(s) {}
};

/// A shrinker-conditional check was asked for on data that does not satisfy
/// the shrinker equation within tolerance.
struct NotAShrinkerError : std::runtime_error {
    double worst_residual;
    explicit NotAShrinkerError(const std::string& what, double res)
        : std::runtime_error(what), worst_residual(res) {}
};

/// The rescaled flow lost its space-likeness margin and was halted.
struct FlowHaltError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace spacelike

#endif
