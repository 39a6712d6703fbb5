#include "spacelike/gauss_map.hpp"

#include <cmath>

namespace spacelike {

GrassmannPoint::GrassmannPoint(std::vector<Vec> basis, Signature sig, double tol)
    : sig_(std::move(sig)) {
    LorentzFrame frame = orthonormal_frame(basis, sig_, tol);
    basis_ = std::move(frame.tangent);
}

GrassmannPoint GrassmannPoint::from_graph(const SpacelikeGraph& graph, const Vec& x) {
    PointGeometry pg = point_geometry(graph, x);
    return GrassmannPoint(pg.frame.tangent, graph.sig());
}

GrassmannPoint GrassmannPoint::coordinate_plane(const Signature& sig) {
    std::vector<Vec> basis;
    for (int i = 0; i < sig.n; ++i) {
        Vec v = Vec::Zero(sig.dim());
        v[i] = 1.0;
        basis.push_back(v);
    }
    return GrassmannPoint(std::move(basis), sig);
}

namespace {

Mat w_matrix(const std::vector<Vec>& p, const std::vector<Vec>& a, const Signature& sig) {
    const int n = static_cast<int>(p.size());
    Mat W(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) W(i, j) = inner(p[i], a[j], sig);
    return W;
}

// Orthonormal (sign -1) completion of `fixed` by time-like vectors,
// projecting the standard time axes in index order.
std::vector<Vec> timelike_completion(const std::vector<Vec>& space_part,
                                     const std::vector<Vec>& time_part, int count,
                                     const Signature& sig) {
    std::vector<Vec> basis = space_part;
    std::vector<double> signs(space_part.size(), 1.0);
    for (const Vec& t : time_part) {
        basis.push_back(t);
        signs.push_back(-1.0);
    }
    std::vector<Vec> out = time_part;
    for (int axis = 0; axis < sig.m && static_cast<int>(out.size()) < count; ++axis) {
        Vec v = Vec::Zero(sig.dim());
        v[sig.n + axis] = 1.0;
        for (std::size_t k = 0; k < basis.size(); ++k)
            v -= signs[k] * inner(v, basis[k], sig) * basis[k];
        const double q = inner(v, v, sig);
        if (q > -1e-12) continue;  // axis already spanned
        v /= std::sqrt(-q);
        out.push_back(v);
        basis.push_back(v);
        signs.push_back(-1.0);
    }
    if (static_cast<int>(out.size()) != count)
        throw FrameDegeneracyError("timelike_completion: could not complete the frame");
    return out;
}

}  // namespace

AngleData angle_data(const GrassmannPoint& P, const GrassmannPoint& A) {
    const Signature& sig = P.sig();
    if (!(sig == A.sig()))
        throw InvalidArgument("angle_data: planes live in different signatures");
    if (P.dim() != A.dim()) throw InvalidArgument("angle_data: planes of different dimension");
    const int n = P.dim(), m = sig.m;

    AngleData ad;
    ad.p_basis = P.basis();

    Mat W = w_matrix(ad.p_basis, A.basis(), sig);
    if (W.determinant() < 0.0) {
        ad.flipped = true;
        ad.p_basis[n - 1] = -ad.p_basis[n - 1];
        W.row(n - 1) = -W.row(n - 1);
    }
    ad.W = W;

    Eigen::JacobiSVD<Mat> svd(W, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec& mu = svd.singularValues();  // descending
    if (mu.minCoeff() < 1.0 - 1e-8)
        throw NumericalDegeneracyError(
            "angle_data: W^T W eigenvalue below 1 (smallest singular value " +
            std::to_string(mu.minCoeff()) + ")");

    ad.thetas.resize(n);
    ad.lambdas.resize(n);
    ad.w = 1.0;
    for (int i = 0; i < n; ++i) {
        ad.thetas[i] = std::acosh(std::max(mu[i], 1.0));
        ad.lambdas[i] = std::tanh(ad.thetas[i]);
        ad.w *= std::max(mu[i], 1.0);
    }

    // Adapted tangent bases from the SVD rotations: W = U diag(mu) V^T, so
    // rotating P by U and A by V diagonalizes the pairing.
    const Mat& U = svd.matrixU();
    const Mat& V = svd.matrixV();
    ad.aligned_tangent.assign(n, Vec::Zero(sig.dim()));
    ad.a_tangent.assign(n, Vec::Zero(sig.dim()));
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            ad.aligned_tangent[i] += U(k, i) * ad.p_basis[k];
            ad.a_tangent[i] += V(k, i) * A.basis()[k];
        }
    }

    // Time-like completion of A: for theta_i > 0 the normal form fixes
    // a_{n+i} = (e_i - cosh(theta_i) a_i) / sinh(theta_i); degenerate angles
    // and any extra directions (m > n) are filled by projecting the standard
    // time axes.
    const double theta_tol = 1e-7;
    std::vector<Vec> assigned;
    std::vector<int> open_slots;
    for (int i = 0; i < n && i < m; ++i) {
        if (ad.thetas[i] > theta_tol) {
            Vec v = (ad.aligned_tangent[i] - std::cosh(ad.thetas[i]) * ad.a_tangent[i]) /
                    std::sinh(ad.thetas[i]);
            assigned.push_back(v);
        } else {
            open_slots.push_back(i);
        }
    }
    std::vector<Vec> completed =
        timelike_completion(ad.a_tangent, assigned, m, sig);
    // completed = assigned ++ fills, in order; distribute back into slots
    ad.a_normal.assign(m, Vec());
    std::size_t used = 0;
    for (int i = 0; i < n && i < m; ++i)
        if (ad.thetas[i] > theta_tol) ad.a_normal[i] = completed[used++];
    std::size_t fill = assigned.size();
    for (int i = 0; i < n && i < m; ++i)
        if (ad.thetas[i] <= theta_tol) ad.a_normal[i] = completed[fill++];
    for (int s = n; s < m; ++s) ad.a_normal[s] = completed[fill++];

    // Adapted normals of P per the normal form; unused time-like directions
    // are carried over unchanged.
    ad.aligned_normal.assign(m, Vec());
    for (int s = 0; s < m; ++s) {
        if (s < n) {
            ad.aligned_normal[s] = std::sinh(ad.thetas[s]) * ad.a_tangent[s] +
                                   std::cosh(ad.thetas[s]) * ad.a_normal[s];
        } else {
            ad.aligned_normal[s] = ad.a_normal[s];
        }
    }
    return ad;
}

double grassmann_distance(const GrassmannPoint& P, const GrassmannPoint& A) {
    AngleData ad = angle_data(P, A);
    double s = 0.0;
    for (double t : ad.thetas) s += t * t;
    return std::sqrt(s);
}

namespace {

void check_replacement_vector(const std::vector<Vec>& p_basis, const Vec& nu,
                              const Signature& sig) {
    if (nu.size() != sig.dim())
        throw InvalidArgument("w_replacement: replacement vector has wrong dimension");
    if (std::abs(inner(nu, nu, sig) + 1.0) > 1e-8)
        throw InvalidArgument("w_replacement: replacement vector is not unit time-like");
    for (const Vec& e : p_basis)
        if (std::abs(inner(nu, e, sig)) > 1e-8)
            throw InvalidArgument("w_replacement: replacement vector is not normal to P");
}

double replaced_det(const std::vector<Vec>& p_basis, const std::vector<Vec>& a_basis,
                    const Signature& sig, int i, const Vec* nu, int j, const Vec* mu) {
    const int n = static_cast<int>(p_basis.size());
    if (i < 0 || i >= n || (mu && (j < 0 || j >= n)))
        throw InvalidArgument("w_replacement: row index out of range");
    if (mu && i == j) throw InvalidArgument("w_double_replacement: indices must differ");
    Mat W = w_matrix(p_basis, a_basis, sig);
    for (int c = 0; c < n; ++c) {
        W(i, c) = inner(*nu, a_basis[c], sig);
        if (mu) W(j, c) = inner(*mu, a_basis[c], sig);
    }
    return W.determinant();
}

}  // namespace

double w_replacement(const GrassmannPoint& P, const GrassmannPoint& A, int i, const Vec& nu) {
    check_replacement_vector(P.basis(), nu, P.sig());
    return replaced_det(P.basis(), A.basis(), P.sig(), i, &nu, -1, nullptr);
}

double w_double_replacement(const GrassmannPoint& P, const GrassmannPoint& A, int i,
                            const Vec& nu, int j, const Vec& mu) {
    check_replacement_vector(P.basis(), nu, P.sig());
    check_replacement_vector(P.basis(), mu, P.sig());
    return replaced_det(P.basis(), A.basis(), P.sig(), i, &nu, j, &mu);
}

double w_replacement(const AngleData& ad, const GrassmannPoint& A, int i, const Vec& nu) {
    return replaced_det(ad.p_basis, A.basis(), A.sig(), i, &nu, -1, nullptr);
}

double w_double_replacement(const AngleData& ad, const GrassmannPoint& A, int i, const Vec& nu,
                            int j, const Vec& mu) {
    return replaced_det(ad.p_basis, A.basis(), A.sig(), i, &nu, j, &mu);
}

double gauss_map_w(const SpacelikeGraph& graph, const Vec& x, const GrassmannPoint& A) {
    GrassmannPoint P = GrassmannPoint::from_graph(graph, x);
    AngleData ad = angle_data(P, A);
    return ad.w;
}

double gauss_map_log_w(const SpacelikeGraph& graph, const Vec& x, const GrassmannPoint& A) {
    return std::log(gauss_map_w(graph, x, A));
}

}  // namespace spacelike
