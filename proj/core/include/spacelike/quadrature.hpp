#ifndef SPACELIKE_QUADRATURE_HPP
#define SPACELIKE_QUADRATURE_HPP

#include <functional>
#include <limits>
#include <memory>

#include "spacelike/graph_geometry.hpp"

namespace spacelike {

/**
 * A parametrized patch of a space-like submanifold over which pseudo-
 * distance sublevel regions are integrated. eval() returns z and the
 * volume density sqrt(det g) at a chart parameter. Intrinsic charts
 * (arclength for curves, arclength x flat for lifts) have density 1 and
 * never suffer chart breakdown, which is why the volume machinery prefers
 * them over graphical windows.
 */
class IntegrationChart {
public:
    virtual ~IntegrationChart() = default;
    virtual int dim() const = 0;
    virtual void bounds(Vec& lo, Vec& hi) const = 0;
    virtual void eval(const Vec& param, double& z, double& weight) const = 0;
};

struct QuadratureOptions {
    double rel_tol = 1e-6;
    double abs_tol = 0.0;
    int base_cells_per_axis = 8;
    long max_cells = 400000;
    int max_depth = 40;
};

struct QuadratureResult {
    double value = 0.0;
    double uncertainty = 0.0;
    long cells = 0;
    bool converged = false;
};

/**
 * Adaptive integral of f(param, z) * sqrt(det g) over the sublevel slab
 * {z_lo <= z(param) < z_hi} of the chart. Cells are kept in a worst-first
 * heap; smooth cells refine on an embedded Gauss error estimate and cells
 * straddling the region boundary refine on their volume bound. The
 * refinement order is deterministic, so results are reproducible.
 */
QuadratureResult integrate_region(
    const IntegrationChart& chart, double z_lo, double z_hi,
    const std::function<double(const Vec&, double)>& f, const QuadratureOptions& opt = {});

inline constexpr double kNoBound = std::numeric_limits<double>::infinity();

/// Chart over a graph's coordinate window (density sqrt(det g)).
class GraphChart final : public IntegrationChart {
public:
    GraphChart(std::shared_ptr<const SpacelikeGraph> graph, Vec lo, Vec hi);
    int dim() const override { return static_cast<int>(lo_.size()); }
    void bounds(Vec& lo, Vec& hi) const override {
        lo = lo_;
        hi = hi_;
    }
    void eval(const Vec& param, double& z, double& weight) const override;

private:
    std::shared_ptr<const SpacelikeGraph> graph_;
    Vec lo_, hi_;
};

}  // namespace spacelike

#endif
