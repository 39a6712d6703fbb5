#ifndef SPACELIKE_DRIFT_HPP
#define SPACELIKE_DRIFT_HPP

#include <functional>
#include <string>
#include <vector>

#include "spacelike/gauss_map.hpp"
#include "spacelike/shrinker.hpp"

namespace spacelike {

/// A scalar function on M given through the chart, e.g. z, |B|^2, ln w.
struct ScalarField {
    std::function<double(const Vec&)> eval;
    int smoothness = 4;
};

ScalarField field_z(std::shared_ptr<const SpacelikeGraph> graph);
ScalarField field_norm_B2(std::shared_ptr<const SpacelikeGraph> graph);
ScalarField field_norm_H2(std::shared_ptr<const SpacelikeGraph> graph);
ScalarField field_w(std::shared_ptr<const SpacelikeGraph> graph, GrassmannPoint reference);
ScalarField field_log_w(std::shared_ptr<const SpacelikeGraph> graph, GrassmannPoint reference);

/// Stencil controls for the finite-difference operators. The step is
/// scaled by max(1, |x|_inf); richardson extrapolates the h and h/2
/// stencils once.
struct FdOptions {
    double step = 4e-3;
    bool richardson = true;
};

/// Chart partials (plain central differences of the field).
Vec chart_gradient_fd(const ScalarField& field, const Vec& x, const FdOptions& opt = {});

/// Laplace-Beltrami in divergence form (1/sqrt g) d_i(sqrt g g^{ij} d_j phi).
double laplace_beltrami_fd(const SpacelikeGraph& graph, const ScalarField& field, const Vec& x,
                           const FdOptions& opt = {});

/// <F, grad phi> with the analytic metric pairing and FD field partials;
/// equals (1/2) <grad z, grad phi> because grad z = 2 F^T.
double drift_inner_fd(const SpacelikeGraph& graph, const ScalarField& field, const Vec& x,
                      const FdOptions& opt = {});

/// The drift operator: Laplace-Beltrami minus half the F-pairing.
double drift_laplacian(const SpacelikeGraph& graph, const ScalarField& field, const Vec& x,
                       const FdOptions& opt = {});

/// The same operator through its weighted-divergence form
/// e^{z/4} (1/sqrt g) d_i(e^{-z/4} sqrt g g^{ij} d_j phi); agreement with
/// drift_laplacian is a consistency invariant of the discretization.
double drift_laplacian_weighted_form(const SpacelikeGraph& graph, const ScalarField& field,
                                     const Vec& x, const FdOptions& opt = {});

/**
 * The identity catalogue. Closed-form right sides are evaluated from
 * analytic tensors; left sides are finite differences over the chart, so
 * each check is an independent confrontation of the two.
 */
enum class IdentityId {
    Dez,      ///< Laplacian of the pseudo-distance equals 2n + Y^2
    NablaFN,  ///< normal derivative of F^N is -<F,e_j> B_ij (general)
    HessH,    ///< covariant Hessian of H in terms of B, P and nabla B
    DLB,      ///< drift Laplacian of |B|^2
    DLH,      ///< drift Laplacian of |H|^2
    Nw,       ///< gradient of w via single replacements
    Dew,      ///< Laplacian of w via double replacements plus the drift term
    DLw,      ///< drift Laplacian of w in aligned frames
    LogwIneq, ///< drift Laplacian of ln w dominates |B|^2/w^2 (one-sided)
    Simons,   ///< Laplacian of |B|^2, the Simons-type form
};

std::vector<IdentityId> identity_catalogue();
const char* identity_name(IdentityId id);      ///< report key, e.g. "ID-Dez"
bool identity_needs_shrinker(IdentityId id);

struct VerifyOptions {
    double tolerance = 1e-6;       ///< sup-residual acceptance for equalities
    double ineq_slack = 1e-8;      ///< one-sided slack for the inequality
    double shrinker_gate = 1e-8;   ///< max |H + F^N/2| tolerated on samples
    FdOptions fd = {};
};

struct IdentityReport {
    std::string id;
    int n = 0, m = 0;
    int samples = 0;
    double sup_residual = 0.0;
    double rms_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    double min_slack = 0.0;  ///< inequality only
};

/**
 * Verify one identity on a manufactured shrinker over the given chart
 * samples. Shrinker-conditional identities gate on the measured residual
 * of the trajectory (not on trust in the factory) and throw
 * NotAShrinkerError when it exceeds the gate. The Gauss-map reference
 * plane is the coordinate n-plane.
 */
IdentityReport verify_identity(const LiftedShrinker& member, IdentityId id,
                               const std::vector<Vec>& samples, const VerifyOptions& opt = {});

/// Runs the whole catalogue.
std::vector<IdentityReport> verify_all_identities(const LiftedShrinker& member,
                                                  const std::vector<Vec>& samples,
                                                  const VerifyOptions& opt = {});

}  // namespace spacelike

#endif
