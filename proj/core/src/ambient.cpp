#include "spacelike/ambient.hpp"

#include <cmath>

namespace spacelike {

double inner(const Vec& u, const Vec& v, const Signature& sig) {
    if (u.size() != sig.dim() || v.size() != sig.dim())
        throw InvalidArgument("inner: vector dimension does not match signature");
    double s = u.head(sig.n).dot(v.head(sig.n));
    double t = u.tail(sig.m).dot(v.tail(sig.m));
    return s - t;
}

Causal causal_character(const Vec& v, const Signature& sig, double tol) {
    const double q = inner(v, v, sig);
    if (q > tol) return Causal::Spacelike;
    if (q < -tol) return Causal::Timelike;
    return Causal::Null;
}

namespace {

// Subtract from v its projection onto the already-orthonormalized vectors.
// signs[k] is <b_k, b_k> = +/-1 for the normalized basis.
Vec project_out(Vec v, const std::vector<Vec>& basis, const std::vector<double>& signs,
                const Signature& sig) {
    for (std::size_t k = 0; k < basis.size(); ++k)
        v -= signs[k] * inner(v, basis[k], sig) * basis[k];
    return v;
}

}  // namespace

LorentzFrame orthonormal_frame(const std::vector<Vec>& tangent_basis,
                               const Signature& sig, double tol) {
    const int n = sig.n, m = sig.m;
    if (static_cast<int>(tangent_basis.size()) != n)
        throw InvalidArgument("orthonormal_frame: need exactly n tangent vectors");

    // Gram matrix must be positive definite for a space-like plane.
    Mat gram(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            gram(i, j) = inner(tangent_basis[i], tangent_basis[j], sig);
    Eigen::SelfAdjointEigenSolver<Mat> es(gram);
    if (es.eigenvalues().minCoeff() <= tol)
        throw DegeneratePlaneError("orthonormal_frame: tangent basis does not span a space-like plane (min Gram eigenvalue " +
                                   std::to_string(es.eigenvalues().minCoeff()) + ")");

    LorentzFrame frame;
    std::vector<double> signs;

    // Tangent part: Gram-Schmidt in input order, metric sign +1 throughout.
    for (int i = 0; i < n; ++i) {
        Vec v = project_out(tangent_basis[i], frame.tangent,
                            std::vector<double>(frame.tangent.size(), 1.0), sig);
        const double q = inner(v, v, sig);
        if (q <= tol)
            throw DegeneratePlaneError("orthonormal_frame: Gram-Schmidt collapse at tangent vector " +
                                       std::to_string(i));
        frame.tangent.push_back(v / std::sqrt(q));
    }

    // Normal part: project the standard time-like axes onto the orthogonal
    // complement and orthonormalize with sign -1.
    std::vector<Vec> all = frame.tangent;
    signs.assign(all.size(), 1.0);
    for (int a = 0; a < m; ++a) {
        Vec axis = Vec::Zero(sig.dim());
        axis[n + a] = 1.0;
        Vec v = project_out(axis, all, signs, sig);
        const double q = inner(v, v, sig);
        if (q > -tol)
            throw FrameDegeneracyError("orthonormal_frame: time-like completion vector is nearly null (norm2 " +
                                       std::to_string(q) + ")");
        v /= std::sqrt(-q);
        frame.normal.push_back(v);
        all.push_back(v);
        signs.push_back(-1.0);
    }
    return frame;
}

bool frame_is_orthonormal(const LorentzFrame& frame, const Signature& sig, double tol) {
    const int n = static_cast<int>(frame.tangent.size());
    const int m = static_cast<int>(frame.normal.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (std::abs(inner(frame.tangent[i], frame.tangent[j], sig) - (i == j ? 1.0 : 0.0)) > tol)
                return false;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            if (std::abs(inner(frame.normal[a], frame.normal[b], sig) + (a == b ? 1.0 : 0.0)) > tol)
                return false;
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < m; ++a)
            if (std::abs(inner(frame.tangent[i], frame.normal[a], sig)) > tol)
                return false;
    return true;
}

Mat boost_matrix(const Signature& sig, int i, int alpha, double theta) {
    if (i < 0 || i >= sig.n || alpha < sig.n || alpha >= sig.dim())
        throw InvalidArgument("boost_matrix: index out of range");
    Mat b = Mat::Identity(sig.dim(), sig.dim());
    b(i, i) = std::cosh(theta);
    b(alpha, alpha) = std::cosh(theta);
    b(i, alpha) = std::sinh(theta);
    b(alpha, i) = std::sinh(theta);
    return b;
}

Mat rotation_matrix(const Signature& sig, int i, int j, double angle) {
    if (i < 0 || j < 0 || i >= sig.n || j >= sig.n || i == j)
        throw InvalidArgument("rotation_matrix: needs two distinct space-like slots");
    Mat r = Mat::Identity(sig.dim(), sig.dim());
    r(i, i) = std::cos(angle);
    r(j, j) = std::cos(angle);
    r(i, j) = -std::sin(angle);
    r(j, i) = std::sin(angle);
    return r;
}

}  // namespace spacelike
