#ifndef SPACELIKE_FLOW_HPP
#define SPACELIKE_FLOW_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "spacelike/ambient.hpp"

namespace spacelike {

/**
 * Graphical rescaled flow on a periodic chart, whose stationary points
 * satisfy the shrinker equation.
 *
 * The evolution law is the graphical reduction of the rescaled motion
 * F -> H + F/2: moving the graph (x, f(x,tau)) with ambient velocity
 * U = H + F/2 and correcting for the horizontal drift gives
 *
 *   df^a/dtau = Delta_g f^a - f^a_i Delta_g x^i + (f^a - x^i f^a_i)/2,
 *
 * and since Delta_g f^a = g^{ij} f^a_ij - g^{ij} Gamma^k_ij f^a_k while
 * Delta_g x^i = -g^{jk} Gamma^i_jk, the Christoffel terms cancel and the
 * stepped form is g^{ij} f^a_ij + (f^a - x^i f^a_i)/2.
 *
 * The chart is a centered torus [-L/2, L/2)^n: the rescaling term needs
 * the origin on the plane, and with the chart centered the coordinate
 * sawtooth at the seam is odd, so zero-mean odd perturbations are not fed
 * into the growing constant mode. Tilted planes are fixed points of the
 * continuum flow but are not periodic, so the probe works relative to the
 * plane through the origin. L must stay below 2*pi*sqrt(2) so that every
 * nonconstant periodic mode of the linearized flow decays.
 */
struct FlowState {
    int n = 1, m = 1;
    double L = 6.0;
    int nodes_per_axis = 64;
    double tau = 0.0;
    /// values[a][node] with row-major node index over the grid
    std::vector<std::vector<double>> values;

    double dx() const { return L / nodes_per_axis; }
    long node_count() const {
        long c = 1;
        for (int d = 0; d < n; ++d) c *= nodes_per_axis;
        return c;
    }
    /// chart coordinate of a node along one axis (centered)
    double coord(int idx) const { return (idx - nodes_per_axis / 2) * dx(); }
};

struct FlowDiagnostics {
    double sup_B = 0.0;
    double sup_residual = 0.0;
    double min_metric_eig = 0.0;
    double sup_f = 0.0;
};

/// Zero initial data on the given grid.
FlowState flat_state(int n, int m, double L, int nodes_per_axis);

/**
 * Random zero-mean perturbation built from products of sines (odd in each
 * chart coordinate, vanishing on the seam), with sup amplitude <= eps.
 */
FlowState perturbed_state(int n, int m, double L, int nodes_per_axis, double eps,
                          std::uint64_t seed, int max_wavenumber = 3);

FlowDiagnostics flow_diagnostics(const FlowState& state);

/// Stability bound for the explicit step: dt <= c (min eig g) dx^2 with
/// c = 1/(2n).
double stable_dt(const FlowState& state, double safety = 0.8);

/**
 * One explicit step. Throws FlowHaltError if the space-likeness margin
 * (min metric eigenvalue > 0.05) is violated or the data stops being
 * finite; the message carries the diagnostics of the offending state.
 */
void flow_step(FlowState& state, double dt);

struct FlowStopRule {
    double residual_tol = 1e-10;
    double affine_tol = 1e-7;  ///< stop early once sup|B| falls below this
    long max_steps = 400000;
    int diag_stride = 50;  ///< record diagnostics every this many steps
};

struct FlowRunReport {
    bool converged = false;      ///< residual_tol reached
    bool affine = false;         ///< terminal sup|B| < affine_tol
    long steps = 0;
    FlowDiagnostics terminal;
    std::vector<double> tau_history;
    std::vector<FlowDiagnostics> history;
    void history_to_csv(const std::string& path) const;
};

/// Runs flow_step with the stability-bound dt until a stop rule fires.
/// Non-convergence is reported in the result, not thrown.
FlowRunReport relax_to_shrinker(FlowState& state, const FlowStopRule& stop);

/// Grid dump: columns x (,y), f_0 (.. f_{m-1}).
void state_to_csv(const FlowState& state, const std::string& path);

}  // namespace spacelike

#endif
