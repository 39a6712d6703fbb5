#ifndef SPACELIKE_GAUSS_MAP_HPP
#define SPACELIKE_GAUSS_MAP_HPP

#include <vector>

#include "spacelike/ambient.hpp"
#include "spacelike/graph_geometry.hpp"

namespace spacelike {

/**
 * A space-like n-plane through the origin, stored as an orthonormalized
 * basis. Construction runs the indefinite Gram-Schmidt, so any spanning
 * set of space-like directions is accepted.
 */
class GrassmannPoint {
public:
    GrassmannPoint(std::vector<Vec> basis, Signature sig, double tol = 1e-10);

    /// The tangent plane of a graph at x, using the deterministic frame.
    static GrassmannPoint from_graph(const SpacelikeGraph& graph, const Vec& x);
    /// The plane spanned by the first n coordinate axes.
    static GrassmannPoint coordinate_plane(const Signature& sig);

    const std::vector<Vec>& basis() const { return basis_; }
    const Signature& sig() const { return sig_; }
    int dim() const { return static_cast<int>(basis_.size()); }

private:
    std::vector<Vec> basis_;
    Signature sig_;
};

/**
 * Hyperbolic principal-angle data of a pair of space-like n-planes.
 *
 * W_ij = <e_i, a_j>; the eigenvalues of W^T W are cosh^2(theta_i) >= 1, the
 * w-function is det W = prod cosh(theta_i), and the aligned frames realize
 * the normal form e_i = cosh(theta_i) a_i + sinh(theta_i) a_{n+i}.
 * If det W < 0 on input, the last basis vector of P is flipped so that
 * w > 0; the basis actually used is recorded in p_basis.
 */
struct AngleData {
    Mat W;
    std::vector<double> thetas;   ///< descending
    std::vector<double> lambdas;  ///< tanh(theta_i)
    double w = 1.0;
    bool flipped = false;

    std::vector<Vec> p_basis;           ///< P basis as used (after any flip)
    std::vector<Vec> aligned_tangent;   ///< adapted e_i
    std::vector<Vec> a_tangent;         ///< adapted a_i
    std::vector<Vec> a_normal;          ///< a_{n+s}, time-like completion of A
    std::vector<Vec> aligned_normal;    ///< adapted normals e_{n+s} of P
};

AngleData angle_data(const GrassmannPoint& P, const GrassmannPoint& A);

/// Canonical distance sqrt(sum theta_i^2) on the pseudo-Grassmannian.
double grassmann_distance(const GrassmannPoint& P, const GrassmannPoint& A);

/**
 * Determinant of W with row i replaced by <nu, a_.> for a unit time-like
 * normal nu of P. In aligned frames this reproduces lambda_i * w for
 * nu = e_{n+i} and 0 for the other adapted normals.
 */
double w_replacement(const GrassmannPoint& P, const GrassmannPoint& A, int i, const Vec& nu);

/// Double replacement: rows i and j (i != j) replaced by nu and mu.
double w_double_replacement(const GrassmannPoint& P, const GrassmannPoint& A, int i,
                            const Vec& nu, int j, const Vec& mu);

/// Same replacements against a precomputed AngleData (uses the recorded,
/// possibly flipped P basis, so signs stay consistent with w).
double w_replacement(const AngleData& ad, const GrassmannPoint& A, int i, const Vec& nu);
double w_double_replacement(const AngleData& ad, const GrassmannPoint& A, int i, const Vec& nu,
                            int j, const Vec& mu);

/// w-function of the tangent plane of a graph at x against reference A.
double gauss_map_w(const SpacelikeGraph& graph, const Vec& x, const GrassmannPoint& A);
double gauss_map_log_w(const SpacelikeGraph& graph, const Vec& x, const GrassmannPoint& A);

}  // namespace spacelike

#endif
