#ifndef SPACELIKE_DOP853_HPP
#define SPACELIKE_DOP853_HPP

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <vector>

#include "spacelike/errors.hpp"

namespace spacelike {

/**
 * Adaptive eighth-order Dormand-Prince integrator (the classic DOP853
 * scheme of Hairer, Norsett and Wanner) with the seventh-order continuous
 * extension. State dimension is arbitrary; the dense output of every
 * accepted step is retained so solutions can be evaluated anywhere in the
 * integration window.
 */
class Dop853 {
public:
    using Vec = Eigen::VectorXd;
    using Rhs = std::function<void(double t, const Vec& y, Vec& dydt)>;
    /// Called after each accepted step; returning true stops the run.
    using StopFn = std::function<bool(double t, const Vec& y)>;

    struct Options {
        double atol = 1e-12;
        double rtol = 1e-12;
        double h_max = 0.0;  ///< 0 = span of the interval
        long max_steps = 2000000;
    };

    struct DenseStep {
        double t0 = 0.0, h = 0.0;
        std::array<Vec, 8> rcont;
    };

    /// Piecewise polynomial solution; eval() uses the dense output of the
    /// step containing t.
    class Solution {
    public:
        double t_begin() const { return t_begin_; }
        double t_end() const { return t_end_; }
        bool forward() const { return t_end_ >= t_begin_; }
        bool stopped_early() const { return stopped_early_; }
        const std::vector<double>& nodes() const { return nodes_; }
        const std::vector<Vec>& node_values() const { return node_values_; }

        Vec eval(double t) const;
        /// First and second derivatives of the dense polynomial at t.
        Vec eval_derivative(double t) const;
        Vec eval_second_derivative(double t) const;

    private:
        friend class Dop853;
        double t_begin_ = 0.0, t_end_ = 0.0;
        bool stopped_early_ = false;
        std::vector<double> nodes_;
        std::vector<Vec> node_values_;
        std::vector<DenseStep> steps_;
        int locate(double t) const;
    };

    /// Integrates from t0 to t1 (either direction). Throws
    /// IntegrationFailure on step-size collapse, carrying the last good t.
    static Solution integrate(const Rhs& f, double t0, const Vec& y0, double t1,
                              const Options& opt = {}, const StopFn& stop = nullptr);
};

}  // namespace spacelike

#endif
