#include "spacelike/jets.hpp"

#include <algorithm>
#include <cmath>

namespace spacelike {

MapJet::MapJet(int n, int m, int order) : n_(n), m_(m), order_(order) {
    if (order < 0 || order > 4)
        throw InvalidArgument("MapJet: order must be in [0,4]");
    value_.assign(m, 0.0);
    if (order >= 1) d1_.assign(static_cast<std::size_t>(m) * n, 0.0);
    if (order >= 2) d2_.assign(static_cast<std::size_t>(m) * n * n, 0.0);
    if (order >= 3) d3_.assign(static_cast<std::size_t>(m) * n * n * n, 0.0);
    if (order >= 4) d4_.assign(static_cast<std::size_t>(m) * n * n * n * n, 0.0);
}

void PolynomialMap::add_term(int component, double coef, std::vector<int> exponents) {
    if (component < 0 || component >= m_)
        throw InvalidArgument("PolynomialMap::add_term: component out of range");
    if (static_cast<int>(exponents.size()) != n_)
        throw InvalidArgument("PolynomialMap::add_term: exponent list must have length n");
    terms_[component].push_back({coef, std::move(exponents)});
}

namespace {

// Value of coef * prod x^e after applying the partial derivatives listed in
// idx (each entry is a coordinate to differentiate by).
double monomial_derivative(double coef, const std::vector<int>& expo, const Vec& x,
                           const int* idx, int k) {
    std::vector<int> e = expo;
    double c = coef;
    for (int t = 0; t < k; ++t) {
        const int i = idx[t];
        if (e[i] == 0) return 0.0;
        c *= e[i];
        e[i] -= 1;
    }
    for (std::size_t i = 0; i < e.size(); ++i)
        for (int p = 0; p < e[i]; ++p) c *= x[static_cast<int>(i)];
    return c;
}

}  // namespace

MapJet PolynomialMap::jets(const Vec& x, int order) const {
    MapJet jet(n_, m_, order);
    int idx[4];
    for (int a = 0; a < m_; ++a) {
        for (const Term& t : terms_[a]) {
            jet.f(a) += monomial_derivative(t.coef, t.exponents, x, idx, 0);
            if (order >= 1)
                for (idx[0] = 0; idx[0] < n_; ++idx[0])
                    jet.d1(a, idx[0]) += monomial_derivative(t.coef, t.exponents, x, idx, 1);
            if (order >= 2)
                for (idx[0] = 0; idx[0] < n_; ++idx[0])
                    for (idx[1] = 0; idx[1] < n_; ++idx[1])
                        jet.d2(a, idx[0], idx[1]) +=
                            monomial_derivative(t.coef, t.exponents, x, idx, 2);
            if (order >= 3)
                for (idx[0] = 0; idx[0] < n_; ++idx[0])
                    for (idx[1] = 0; idx[1] < n_; ++idx[1])
                        for (idx[2] = 0; idx[2] < n_; ++idx[2])
                            jet.d3(a, idx[0], idx[1], idx[2]) +=
                                monomial_derivative(t.coef, t.exponents, x, idx, 3);
            if (order >= 4)
                for (idx[0] = 0; idx[0] < n_; ++idx[0])
                    for (idx[1] = 0; idx[1] < n_; ++idx[1])
                        for (idx[2] = 0; idx[2] < n_; ++idx[2])
                            for (idx[3] = 0; idx[3] < n_; ++idx[3])
                                jet.d4(a, idx[0], idx[1], idx[2], idx[3]) +=
                                    monomial_derivative(t.coef, t.exponents, x, idx, 4);
        }
    }
    return jet;
}

namespace {

// Central difference of a vector-valued function along coordinate i.
template <typename F>
Vec central(const F& fn, const Vec& x, int i, double h) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    return (fn(xp) - fn(xm)) / (2.0 * h);
}

template <typename F>
Vec central_richardson(const F& fn, const Vec& x, int i, double h) {
    const Vec dh = central(fn, x, i, h);
    const Vec dh2 = central(fn, x, i, h / 2.0);
    return (4.0 * dh2 - dh) / 3.0;
}

}  // namespace

MapJet FiniteDifferenceMap::jets(const Vec& x, int order) const {
    const double h = step_factor_ * std::max(1.0, x.cwiseAbs().maxCoeff());
    MapJet jet(n_, m_, order);

    const Vec v = fn_(x);
    for (int a = 0; a < m_; ++a) jet.f(a) = v[a];
    if (order < 1) return jet;

    // Each level differentiates the closure for the previous level, so the
    // noise grows with order; see the class comment.
    auto lvl0 = [&](const Vec& y) { return fn_(y); };
    for (int i = 0; i < n_; ++i) {
        const Vec d = central_richardson(lvl0, x, i, h);
        for (int a = 0; a < m_; ++a) jet.d1(a, i) = d[a];
    }
    if (order < 2) return jet;

    auto lvl1 = [&](const Vec& y, int i) { return central_richardson(lvl0, y, i, h); };
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j) {
            auto fji = [&](const Vec& y) { return lvl1(y, j); };
            const Vec d = central_richardson(fji, x, i, h);
            for (int a = 0; a < m_; ++a) {
                jet.d2(a, i, j) = d[a];
                jet.d2(a, j, i) = d[a];
            }
        }
    if (order < 3) return jet;

    const double h3 = 4.0 * h;  // wider step to hold off roundoff at depth 3
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j)
            for (int k = j; k < n_; ++k) {
                auto fkj = [&](const Vec& y) {
                    auto fk = [&](const Vec& w) { return central(lvl0, w, k, h3); };
                    return central(fk, y, j, h3);
                };
                const Vec d = central_richardson(fkj, x, i, h3);
                int p[3] = {i, j, k};
                std::sort(p, p + 3);
                do {
                    for (int a = 0; a < m_; ++a) jet.d3(a, p[0], p[1], p[2]) = d[a];
                } while (std::next_permutation(p, p + 3));
            }
    if (order < 4) return jet;

    const double h4 = 8.0 * h;
    for (int i = 0; i < n_; ++i)
        for (int j = i; j < n_; ++j)
            for (int k = j; k < n_; ++k)
                for (int l = k; l < n_; ++l) {
                    auto f3 = [&](const Vec& y) {
                        auto fl = [&](const Vec& w) { return central(lvl0, w, l, h4); };
                        auto fkl = [&](const Vec& w) { return central(fl, w, k, h4); };
                        return central(fkl, y, j, h4);
                    };
                    const Vec d = central(f3, x, i, h4);
                    int q[4] = {i, j, k, l};
                    std::sort(q, q + 4);
                    do {
                        for (int a = 0; a < m_; ++a)
                            jet.d4(a, q[0], q[1], q[2], q[3]) = d[a];
                    } while (std::next_permutation(q, q + 4));
                }
    return jet;
}

}  // namespace spacelike
