#ifndef SPACELIKE_AMBIENT_HPP
#define SPACELIKE_AMBIENT_HPP

#include <Eigen/Dense>
#include <vector>

#include "spacelike/errors.hpp"

namespace spacelike {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/**
 * Ambient signature of R^{n+m}_m. Coordinate slots are laid out in fixed
 * order: the first n carry metric sign +1 (space-like), the last m carry
 * sign -1 (time-like).
 */
struct Signature {
    int n = 1;  ///< space-like dimensions
    int m = 1;  ///< time-like dimensions

    Signature() = default;
    Signature(int n_, int m_) : n(n_), m(m_) {
        if (n < 1 || m < 1)
            throw InvalidArgument("Signature requires n >= 1 and m >= 1");
    }

    int dim() const { return n + m; }
    bool operator==(const Signature&) const = default;
};

enum class Causal { Spacelike, Timelike, Null };

/// Indefinite inner product: sum of products over the first n slots minus
/// the sum over the last m slots.
double inner(const Vec& u, const Vec& v, const Signature& sig);

/// <v,v> for the signature metric.
inline double norm2(const Vec& v, const Signature& sig) { return inner(v, v, sig); }

/// Classify v: spacelike if <v,v> > tol, timelike if < -tol, else null.
Causal causal_character(const Vec& v, const Signature& sig, double tol = 1e-12);

/**
 * An orthonormal Lorentz frame adapted to a space-like n-plane:
 * n space-like tangent vectors with <e_i,e_j> = delta_ij, m time-like
 * normal vectors with <e_a,e_b> = -delta_ab, and <e_i,e_a> = 0.
 */
struct LorentzFrame {
    std::vector<Vec> tangent;
    std::vector<Vec> normal;
};

/**
 * Build a Lorentz frame from a basis of a space-like n-plane.
 *
 * The tangent part is the indefinite Gram-Schmidt of the input in the given
 * order (no pivoting, so the result is deterministic for a fixed input
 * order). The normal part completes the frame by projecting the standard
 * time-like axes onto the orthogonal complement and orthonormalizing with
 * sign -1.
 *
 * Throws DegeneratePlaneError if the input Gram matrix is not positive
 * definite above tol, and FrameDegeneracyError if a completion vector
 * comes out too close to null.
 */
LorentzFrame orthonormal_frame(const std::vector<Vec>& tangent_basis,
                               const Signature& sig, double tol = 1e-10);

/// Tolerance for the orthonormality check below.
bool frame_is_orthonormal(const LorentzFrame& frame, const Signature& sig,
                          double tol = 1e-10);

/**
 * Lorentz boost with hyperbolic angle theta in the plane spanned by
 * space-like slot i and time-like slot alpha (0-based ambient indices,
 * alpha >= n). Acts as identity elsewhere.
 */
Mat boost_matrix(const Signature& sig, int i, int alpha, double theta);

/// Rotation by angle in the plane of two space-like slots (test helper for
/// randomized frame constructions).
Mat rotation_matrix(const Signature& sig, int i, int j, double angle);

}  // namespace spacelike

#endif
