#ifndef SPACELIKE_VOLUME_HPP
#define SPACELIKE_VOLUME_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spacelike/quadrature.hpp"
#include "spacelike/shrinker.hpp"

namespace spacelike {

/**
 * Intrinsic charts for the manufactured shrinkers: arclength on the curve
 * factors plus flat coordinates, so the volume density is exactly 1 and
 * the chart covers the whole traced window, including the steep regions
 * that no graphical window reaches.
 */
std::shared_ptr<IntegrationChart> intrinsic_chart(const LiftedShrinker& lift, double r_max,
                                                  double forward_z_cap = kNoBound);

/// Pseudo-distance sublevel region D_r = {z < r^2} together with the
/// quadrature controls used to integrate over it.
struct RegionSpec {
    double r;
    QuadratureOptions quad = {};
};

/// integral over D_r of e^{-alpha z} dmu (alpha = 0 gives the volume V(r)).
QuadratureResult volume_integral(const IntegrationChart& chart, const RegionSpec& region,
                                 double alpha = 0.0);

/// Same weight over the slab {z_lo <= z < z_hi}.
QuadratureResult annulus_integral(const IntegrationChart& chart, double z_lo, double z_hi,
                                  double alpha, const QuadratureOptions& opt = {});

struct GrowthTable {
    std::vector<double> r;
    std::vector<double> V;
    std::vector<double> weighted_V;  ///< integral of e^{-z/4} over D_r
    void to_csv(const std::string& path) const;
};

GrowthTable growth_table(const IntegrationChart& chart, const std::vector<double>& r_values,
                         const QuadratureOptions& opt = {});

/**
 * Gaussian-weighted area functional F_t(D_r) = (4 pi t)^{-n/2}
 * int_{D_r} e^{-z/4t}. The t-derivative is a centered difference evaluated
 * as a single quadrature of the differenced integrand, so region noise
 * cancels instead of being amplified by 1/(2 delta).
 */
double gaussian_functional(const IntegrationChart& chart, const RegionSpec& region, double t);
double gaussian_functional_dt(const IntegrationChart& chart, const RegionSpec& region, double t,
                              double delta = 1e-4);
double gaussian_functional_dr(const IntegrationChart& chart, const RegionSpec& region, double t,
                              double delta_factor = 1e-4);

struct MonotonicityReport {
    std::vector<double> t_grid, r_grid;
    Mat dF;  ///< dF(i,j) = F'_t(D_r) at t_grid[i], r_grid[j]
    double max_dF = 0.0;
    bool pass = false;  ///< max_dF <= tolerance
};

MonotonicityReport monotonicity_check(const IntegrationChart& chart,
                                      const std::vector<double>& r_values,
                                      const std::vector<double>& t_values, double tolerance = 1e-8,
                                      const QuadratureOptions& opt = {});

/**
 * Doubling-lemma checks on a growth table. C1 is fitted as the largest
 * ratio V(r) / (r^n V(r/2)) over the doubling pairs; C3 anchors the bound
 * C3 e^{2n (log r)^2} at the smallest tabulated r. margins are
 * log(bound) - log(V) at the later rows and must stay nonnegative.
 */
struct DoublingReport {
    double C1 = 0.0, C3 = 0.0;
    std::vector<double> hypothesis_ratio;  ///< V(r)/(r^n V(r/2)) per pair
    std::vector<double> bound_margin;      ///< log C3 e^{2n(log r)^2} - log V(r)
    double min_margin = 0.0;
    bool pass = false;
};

DoublingReport doubling_check(const GrowthTable& table, int n);

/// Cauchy behavior of the weighted volumes: successive doubling increments
/// of int e^{-alpha z} must shrink geometrically.
struct CauchyReport {
    double alpha;
    std::vector<double> increments;  ///< over D_{2r} \ D_r for each tabulated pair
    double worst_ratio = 0.0;        ///< max of increment_{k+1}/increment_k
    bool pass = false;
};

CauchyReport weighted_cauchy_check(const IntegrationChart& chart, double alpha,
                                   const std::vector<double>& r_values,
                                   const QuadratureOptions& opt = {});

/**
 * Smallest eigenvalue of Ric_f - g/2 at a point of a shrinker, with
 * Ric(e_i,e_j) = <H,B_ij> - <B_ik,B_jk> from the Gauss equation and
 * Hess f = Hess z / 4. The point must satisfy the shrinker equation to
 * residual_gate, since the Hessian step uses it.
 */
double bakry_emery_check(const SpacelikeGraph& graph, const Vec& x, double residual_gate = 1e-8);

/**
 * Desk-scale probe of the mean-curvature rigidity estimate: with the
 * cutoff eps = phi(|F|/r) (phi = 1 on [0,1), 0 on [2,inf), cubic bridge
 * with |phi'| <= C = 1.5), the weighted integral of (|H|^2/2 + |P|^2)
 * over D_r is controlled by (C^2/r^2) int_{D_2r \ D_r} |H|^2 (1 + 4|H|^2/z).
 * The probe evaluates both sides on an intrinsic chart and reports the
 * decay trend of the right side, plus the measured growth exponent
 * alpha = sup ln|H|^2 / z over the window.
 */
struct ProbeRow {
    double r;
    double lhs;  ///< int_{D_r} (|H|^2/2 + |P|^2) rho
    double rhs;  ///< (C^2/r^2) int_{D_2r\D_r} |H|^2 (1 + 4|H|^2/z) rho
};

struct ProbeReport {
    std::vector<ProbeRow> rows;
    double cutoff_constant = 1.5;
    double measured_alpha = 0.0;
    bool rhs_decreasing = false;
};

/// h2_scale, when given, multiplies |H|^2 pointwise (the synthetic
/// negative control scales it by e^{z/4}).
ProbeReport theorem_probe_H(const LiftedShrinker& lift, const std::vector<double>& r_values,
                            std::optional<double> alpha = std::nullopt,
                            const std::function<double(double)>& h2_scale = nullptr,
                            const QuadratureOptions& opt = {});

/// Probe variant for explicit graphs (used by the affine-plane case).
ProbeReport theorem_probe_H_graph(std::shared_ptr<const SpacelikeGraph> graph, const Vec& lo,
                                  const Vec& hi, const std::vector<double>& r_values,
                                  const std::function<double(double)>& h2_scale = nullptr,
                                  const QuadratureOptions& opt = {});

}  // namespace spacelike

#endif
