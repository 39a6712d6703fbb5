#ifndef SPACELIKE_SHRINKER_HPP
#define SPACELIKE_SHRINKER_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spacelike/dop853.hpp"
#include "spacelike/graph_geometry.hpp"

namespace spacelike {

/**
 * Arc-length-parametrized shrinker curve in R^2_1, integrated from the
 * first-order reduction
 *
 *   gamma1' = cosh(phi),  gamma2' = sinh(phi),
 *   phi'    = (gamma1 sinh(phi) - gamma2 cosh(phi)) / 2,
 *
 * which encodes the curve-shrinker equation with unit tangent
 * (cosh phi, sinh phi) and unit time-like normal (sinh phi, cosh phi):
 * the curvature vector is phi' times the normal, and the normal position
 * component is <F,nu> = gamma1 sinh(phi) - gamma2 cosh(phi), so phi' = <F,nu>/2
 * is exactly H = -F^N/2.
 *
 * gamma1' = cosh(phi) > 0, so the curve is globally a graph over the first
 * axis; s = 0 carries the initial condition and the window extends to both
 * sides of it.
 */
class ShrinkerCurve {
public:
    struct State {
        double s, gamma1, gamma2, phi;
    };

    double s_min() const { return s_min_; }
    double s_max() const { return s_max_; }
    double integrator_tol() const { return tol_; }

    State at(double s) const;
    Eigen::Vector3d y(double s) const;    ///< dense (gamma1, gamma2, phi)
    Eigen::Vector3d dy(double s) const;   ///< dense-polynomial s-derivative
    Eigen::Vector3d ddy(double s) const;  ///< dense-polynomial second derivative

    /// z = <F,F> at arclength s.
    double z_of(double s) const;
    /// Tangential and normal position components <F,T>, <F,nu>.
    double u_of(double s) const;
    double v_of(double s) const;

    /// Invariant squared norm of H + F^N/2 for the numerically traced
    /// curve, computed from the dense polynomial and its derivatives alone.
    double residual2(double s) const;
    double sup_residual2_at_nodes() const;

    /// Accepted-step arclength nodes (both directions merged, ascending).
    std::vector<double> nodes() const;

    /// gamma1 is strictly increasing; solves gamma1(s) = x.
    double arclength_of_x(double x) const;

    struct Window {
        double s_lo, s_hi;
        double x_lo, x_hi;  ///< gamma1 range of the window
    };
    /// Largest window around s = 0 with |tanh(phi)| < bound.
    Window graphical_window(double tanh_bound = 0.95) const;

    /// CSV export: columns s, gamma1, gamma2, phi, residual2 at the nodes.
    void to_csv(const std::string& path) const;

private:
    friend ShrinkerCurve integrate_shrinker_curve(double, double, double, double, double, double,
                                                  std::optional<double>, std::optional<double>);
    std::optional<Dop853::Solution> fwd_, bwd_;
    Eigen::Vector3d y0_;
    double s_min_ = 0.0, s_max_ = 0.0, tol_ = 0.0;
};

/**
 * Integrate a shrinker curve from (gamma1_0, gamma2_0) with slope angle
 * phi0 over s in [s_lo, s_hi] (s_lo <= 0 <= s_hi). Optional z caps stop
 * each direction once the pseudo-distance exceeds them, which is how the
 * volume windows are built: z grows without bound backward, while in the
 * forward direction it grows only logarithmically in the blow-up frame,
 * so a forward cap must stay moderate.
 */
ShrinkerCurve integrate_shrinker_curve(double gamma1_0, double gamma2_0, double phi0, double s_lo,
                                       double s_hi, double tol,
                                       std::optional<double> z_stop_backward = std::nullopt,
                                       std::optional<double> z_stop_forward = std::nullopt);

/**
 * Graph adapters over a curve window. Jet flavors:
 *  - ShrinkerExact: first derivative tanh(phi) and the higher orders from
 *    the closed forms of the reduction (phi' = v/2, phi'' = uv/4, ...);
 *    smooth, used for identity verification.
 *  - Trajectory: orders 0..2 from the dense-polynomial derivatives of the
 *    traced curve, so the shrinker equation is NOT assumed; this is the
 *    flavor behind the residual oracle. Orders 3..4 fall back to the
 *    closed forms.
 */
enum class CurveJets { ShrinkerExact, Trajectory };

/// Jet provider for the curve seen as a graph gamma2 = f(gamma1).
std::shared_ptr<const JetProvider> curve_jet_provider(std::shared_ptr<const ShrinkerCurve> curve,
                                                      CurveJets flavor);

/**
 * A manufactured shrinker wrapped as a SpacelikeGraph, with the chart
 * window in graph coordinates. kind records how it was built.
 */
struct LiftedShrinker {
    enum class Kind { Curve, Cylinder, Product };
    Kind kind = Kind::Curve;
    int flat_dims = 0;
    std::shared_ptr<const ShrinkerCurve> c1, c2;

    std::shared_ptr<SpacelikeGraph> graph;             ///< shrinker-exact jets
    std::shared_ptr<SpacelikeGraph> trajectory_graph;  ///< trajectory jets

    Vec x_lo, x_hi;  ///< graphical chart box (curve axes bounded, flat axes wide)

    /// Upper bound used for lifted residuals: the base curves' node residual.
    double base_residual2 = 0.0;
};

/// The curve itself in graph form (n = 1, m = 1).
LiftedShrinker curve_graph(std::shared_ptr<const ShrinkerCurve> curve);

/// Cylinder Gamma x R^k in R^{(1+k)+1}_1 (n = 1+k, m = 1).
LiftedShrinker cylinder_lift(std::shared_ptr<const ShrinkerCurve> curve, int k);

/// Product Gamma1 x Gamma2 in R^4_2 (n = 2, m = 2).
LiftedShrinker product_shrinker(std::shared_ptr<const ShrinkerCurve> c1,
                                std::shared_ptr<const ShrinkerCurve> c2);

/// Deterministic sample points inside the chart window (uniform per axis,
/// flat axes restricted to |t| <= flat_range).
std::vector<Vec> sample_points(const LiftedShrinker& lift, int count, std::uint64_t seed,
                               double flat_range = 2.5, double curve_margin = 0.02);

/**
 * The standard verification suite: the curve from (2,0) with phi0 = 0.5,
 * its k = 1 cylinder, and the product of two copies of the curve.
 */
struct SuiteConfig {
    double gamma1_0 = 2.0, gamma2_0 = 0.0, phi0 = 0.5;
    double ode_tol = 1e-11;
    double z_backward = 80.0;  ///< backward z cap for the identity windows
    double z_forward = 30.0;   ///< forward z cap
};

struct Suite {
    std::vector<std::string> names;
    std::vector<LiftedShrinker> members;
};

Suite build_standard_suite(const SuiteConfig& cfg, int n_limit = 0, int m_limit = 0);

}  // namespace spacelike

#endif
