#ifndef SPACELIKE_JETS_HPP
#define SPACELIKE_JETS_HPP

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "spacelike/errors.hpp"

namespace spacelike {

using Vec = Eigen::VectorXd;

/**
 * Partial-derivative jet of a map f: R^n -> R^m at a point, holding the
 * value and dense derivative tensors up to the requested order (at most 4).
 * Derivative tensors are stored with full index redundancy; providers fill
 * all permutations.
 */
class MapJet {
public:
    MapJet(int n, int m, int order);

    int n() const { return n_; }
    int m() const { return m_; }
    int order() const { return order_; }

    double f(int a) const { return value_[a]; }
    double& f(int a) { return value_[a]; }

    double d1(int a, int i) const { return d1_[a * n_ + i]; }
    double& d1(int a, int i) { return d1_[a * n_ + i]; }

    double d2(int a, int i, int j) const { return d2_[(a * n_ + i) * n_ + j]; }
    double& d2(int a, int i, int j) { return d2_[(a * n_ + i) * n_ + j]; }

    double d3(int a, int i, int j, int k) const {
        return d3_[((a * n_ + i) * n_ + j) * n_ + k];
    }
    double& d3(int a, int i, int j, int k) {
        return d3_[((a * n_ + i) * n_ + j) * n_ + k];
    }

    double d4(int a, int i, int j, int k, int l) const {
        return d4_[(((a * n_ + i) * n_ + j) * n_ + k) * n_ + l];
    }
    double& d4(int a, int i, int j, int k, int l) {
        return d4_[(((a * n_ + i) * n_ + j) * n_ + k) * n_ + l];
    }

private:
    int n_, m_, order_;
    std::vector<double> value_, d1_, d2_, d3_, d4_;
};

/**
 * Source of jets for a graph map f: R^n -> R^m. Implementations must be
 * reentrant: jets() may be called concurrently.
 */
class JetProvider {
public:
    virtual ~JetProvider() = default;
    virtual int domain_dim() const = 0;
    virtual int range_dim() const = 0;
    /// Highest derivative order this provider fills exactly.
    virtual int max_order() const = 0;
    virtual MapJet jets(const Vec& x, int order) const = 0;
};

/**
 * Polynomial map: each component is a sum of monomial terms
 * coef * prod_i x_i^{e_i}. All derivative orders are exact.
 */
class PolynomialMap final : public JetProvider {
public:
    struct Term {
        double coef;
        std::vector<int> exponents;  // length n
    };

    PolynomialMap(int n, int m) : n_(n), m_(m), terms_(m) {}
    void add_term(int component, double coef, std::vector<int> exponents);

    int domain_dim() const override { return n_; }
    int range_dim() const override { return m_; }
    int max_order() const override { return 4; }
    MapJet jets(const Vec& x, int order) const override;

private:
    int n_, m_;
    std::vector<std::vector<Term>> terms_;
};

/// Jets supplied by a user closure that fills the whole MapJet analytically.
class AnalyticMap final : public JetProvider {
public:
    using Fn = std::function<MapJet(const Vec&, int order)>;
    AnalyticMap(int n, int m, Fn fn) : n_(n), m_(m), fn_(std::move(fn)) {}

    int domain_dim() const override { return n_; }
    int range_dim() const override { return m_; }
    int max_order() const override { return 4; }
    MapJet jets(const Vec& x, int order) const override { return fn_(x, order); }

private:
    int n_, m_;
    Fn fn_;
};

/**
 * Finite-difference fallback around a value-only map. Derivatives are
 * nested central differences with step h = step_factor * max(1, |x|),
 * Richardson-extrapolated once. Fourth-order jets from this provider are
 * noisy; analytic providers are the default for acceptance-grade runs.
 */
class FiniteDifferenceMap final : public JetProvider {
public:
    using Fn = std::function<Vec(const Vec&)>;
    FiniteDifferenceMap(int n, int m, Fn fn, double step_factor = 1e-4)
        : n_(n), m_(m), fn_(std::move(fn)), step_factor_(step_factor) {}

    int domain_dim() const override { return n_; }
    int range_dim() const override { return m_; }
    int max_order() const override { return 4; }
    MapJet jets(const Vec& x, int order) const override;

private:
    int n_, m_;
    Fn fn_;
    double step_factor_;
};

}  // namespace spacelike

#endif
