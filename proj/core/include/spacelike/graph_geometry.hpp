#ifndef SPACELIKE_GRAPH_GEOMETRY_HPP
#define SPACELIKE_GRAPH_GEOMETRY_HPP

#include <memory>
#include <utility>
#include <vector>

#include "spacelike/ambient.hpp"
#include "spacelike/jets.hpp"

namespace spacelike {

struct GraphTolerances {
    double spacelike = 1e-10;  ///< min metric eigenvalue accepted
    double frame = 1e-10;
    double causal = 1e-12;
};

/**
 * Graphical space-like submanifold M = {(x, f(x))} of R^{n+m}_m. The map f
 * is supplied as a jet provider; the induced metric
 * g_ij = delta_ij - sum_a f^a_i f^a_j must stay positive definite on the
 * queried domain.
 */
class SpacelikeGraph {
public:
    SpacelikeGraph(Signature sig, std::shared_ptr<const JetProvider> f,
                   GraphTolerances tol = {});

    const Signature& sig() const { return sig_; }
    const JetProvider& f() const { return *f_; }
    std::shared_ptr<const JetProvider> provider() const { return f_; }
    const GraphTolerances& tol() const { return tol_; }

    /// Ambient position (x, f(x)).
    Vec position(const Vec& x) const;

private:
    Signature sig_;
    std::shared_ptr<const JetProvider> f_;
    GraphTolerances tol_;
};

/// Ambient-vector-valued symmetric (0,2) array, indexed [i][j].
using VecGrid2 = std::vector<std::vector<Vec>>;
/// Ambient-vector-valued (0,3) array, indexed [k][i][j].
using VecGrid3 = std::vector<std::vector<std::vector<Vec>>>;

/**
 * Per-point geometric state of a graph: frames, metric, second fundamental
 * form, mean curvature and the pseudo-distance decomposition
 * x^i = <F,e_i>, y^a = -<F,e_a>, z = X^2 - Y^2.
 *
 * Coordinate-basis objects (tau, B, H as ambient vectors) are kept next to
 * their orthonormal-frame components h^a_ij, H^a; the frame is the
 * deterministic Gram-Schmidt frame of pseudo_ambient, so the component
 * arrays are reproducible run to run.
 */
struct PointGeometry {
    Vec x;       ///< chart point (n)
    Vec F;       ///< ambient position (n+m)
    Mat g, g_inv;
    double sqrt_det_g = 0.0;
    std::vector<Vec> tau;  ///< coordinate tangents, ambient
    LorentzFrame frame;
    Mat frame_coeff;       ///< E with e_i = sum_k E(i,k) tau_k
    VecGrid2 B;            ///< second fundamental form, ambient normal vectors
    std::vector<Mat> h;    ///< h[a](i,j) in the orthonormal frames
    Vec H;                 ///< mean curvature vector, ambient
    Vec H_comp;            ///< H^a with H = H^a e_a
    Vec FN;                ///< normal part of F
    Vec xcomp, ycomp;
    double X2 = 0.0, Y2 = 0.0, z = 0.0;
};

/**
 * Third-order tensors and the scalar invariants of the Simons-type
 * machinery: covariant derivatives of B and H, S_ab = h^a_ij h^b_ij,
 * P_ij = <B_ij, H>, the normal curvature norm, and the all-plus squared
 * norms of everything.
 */
struct DerivedTensors {
    PointGeometry pg;
    VecGrid3 nablaB;          ///< (nabla_k B)_ij, ambient normal vectors
    std::vector<Vec> nablaH;  ///< (nabla_k H), ambient normal vectors
    Mat S;                    ///< S(a,b) = sum_ij h^a_ij h^b_ij
    Mat P;                    ///< P(i,j) = <B(e_i,e_j), H>, orthonormal frame
    double Rperp2 = 0.0;
    double normB2 = 0.0, normH2 = 0.0;
    double normNablaB2 = 0.0, normNablaH2 = 0.0, normP2 = 0.0;
};

PointGeometry point_geometry(const SpacelikeGraph& graph, const Vec& x);
DerivedTensors derived_tensors(const SpacelikeGraph& graph, const Vec& x);

/// H + F^N/2; the zero vector exactly when the shrinker equation holds at x.
Vec shrinker_residual(const SpacelikeGraph& graph, const Vec& x);

/// Invariant residual magnitude squared -<R,R> (R is normal, so this is >= 0).
double shrinker_residual2(const SpacelikeGraph& graph, const Vec& x);

/// Hessian of z in the coordinate basis: 2(g_kl + <F, B_kl>).
Mat hess_z(const SpacelikeGraph& graph, const Vec& x);

/// Same Hessian in the orthonormal tangent frame: 2(delta_ij - y^a h^a_ij).
Mat hess_z_frame(const PointGeometry& pg);

struct LaplaceZ {
    double general;        ///< 2n - 2 y^a H^a, valid on any space-like graph
    double shrinker_form;  ///< 2n + Y^2, equal to the general value on shrinkers
};
LaplaceZ laplace_z(const SpacelikeGraph& graph, const Vec& x);

/**
 * Analytic second covariant derivative of the mean curvature, as a normal-
 * vector-valued (0,2) tensor in the coordinate basis. Consumes order-4 jets.
 */
VecGrid2 hess_H(const SpacelikeGraph& graph, const Vec& x);

/// Christoffel symbols of the induced metric: gamma[l](k,i) = Gamma^l_ki.
std::vector<Mat> christoffel(const SpacelikeGraph& graph, const Vec& x);

/**
 * Light per-point chart data for finite-difference loops: tangents, metric,
 * volume density and the pseudo-distance, from order-1 jets only.
 */
struct ChartPoint {
    Vec F;
    std::vector<Vec> tau;
    Mat g, g_inv;
    double sqrt_det_g = 0.0;
    double z = 0.0;
};
ChartPoint chart_point(const SpacelikeGraph& graph, const Vec& x);

}  // namespace spacelike

#endif
