#include "spacelike/graph_geometry.hpp"

#include <cmath>

namespace spacelike {

SpacelikeGraph::SpacelikeGraph(Signature sig, std::shared_ptr<const JetProvider> f,
                               GraphTolerances tol)
    : sig_(std::move(sig)), f_(std::move(f)), tol_(tol) {
    if (!f_) throw InvalidArgument("SpacelikeGraph: null jet provider");
    if (f_->domain_dim() != sig_.n || f_->range_dim() != sig_.m)
        throw InvalidArgument("SpacelikeGraph: jet provider dimensions do not match signature");
}

Vec SpacelikeGraph::position(const Vec& x) const {
    MapJet jet = f_->jets(x, 0);
    Vec F(sig_.dim());
    F.head(sig_.n) = x;
    for (int a = 0; a < sig_.m; ++a) F[sig_.n + a] = jet.f(a);
    return F;
}

namespace {

// Assemble tau_i = (e_i, f^a_i) from a first-order jet.
std::vector<Vec> coordinate_tangents(const Signature& sig, const Vec& x, const MapJet& jet) {
    std::vector<Vec> tau(sig.n, Vec::Zero(sig.dim()));
    (void)x;
    for (int i = 0; i < sig.n; ++i) {
        tau[i][i] = 1.0;
        for (int a = 0; a < sig.m; ++a) tau[i][sig.n + a] = jet.d1(a, i);
    }
    return tau;
}

Mat induced_metric(const Signature& sig, const MapJet& jet) {
    Mat g = Mat::Identity(sig.n, sig.n);
    for (int i = 0; i < sig.n; ++i)
        for (int j = 0; j < sig.n; ++j)
            for (int a = 0; a < sig.m; ++a) g(i, j) -= jet.d1(a, i) * jet.d1(a, j);
    return g;
}

void check_spacelike(const Mat& g, double tol) {
    Eigen::SelfAdjointEigenSolver<Mat> es(g);
    const double lo = es.eigenvalues().minCoeff();
    if (lo <= tol)
        throw NotSpacelikeError("graph is not space-like at the queried point (min metric eigenvalue " +
                                    std::to_string(lo) + ")",
                                lo);
}

// Ambient vector with only the time-like block filled from the order-k jet
// entry d_k f^a at a fixed multi-index.
Vec vertical(const Signature& sig, const MapJet& jet, int i, int j) {
    Vec v = Vec::Zero(sig.dim());
    for (int a = 0; a < sig.m; ++a) v[sig.n + a] = jet.d2(a, i, j);
    return v;
}

Vec vertical3(const Signature& sig, const MapJet& jet, int i, int j, int k) {
    Vec v = Vec::Zero(sig.dim());
    for (int a = 0; a < sig.m; ++a) v[sig.n + a] = jet.d3(a, i, j, k);
    return v;
}

Vec vertical4(const Signature& sig, const MapJet& jet, int i, int j, int k, int l) {
    Vec v = Vec::Zero(sig.dim());
    for (int a = 0; a < sig.m; ++a) v[sig.n + a] = jet.d4(a, i, j, k, l);
    return v;
}

}  // namespace

ChartPoint chart_point(const SpacelikeGraph& graph, const Vec& x) {
    const Signature& sig = graph.sig();
    MapJet jet = graph.f().jets(x, 1);
    ChartPoint cp;
    cp.F = Vec(sig.dim());
    cp.F.head(sig.n) = x;
    for (int a = 0; a < sig.m; ++a) cp.F[sig.n + a] = jet.f(a);
    cp.tau = coordinate_tangents(sig, x, jet);
    cp.g = induced_metric(sig, jet);
    check_spacelike(cp.g, graph.tol().spacelike);
    cp.g_inv = cp.g.inverse();
    cp.sqrt_det_g = std::sqrt(cp.g.determinant());
    cp.z = inner(cp.F, cp.F, sig);
    return cp;
}

PointGeometry point_geometry(const SpacelikeGraph& graph, const Vec& x) {
    const Signature& sig = graph.sig();
    const int n = sig.n, m = sig.m;
    MapJet jet = graph.f().jets(x, 2);

    PointGeometry pg;
    pg.x = x;
    pg.F = Vec(sig.dim());
    pg.F.head(n) = x;
    for (int a = 0; a < m; ++a) pg.F[n + a] = jet.f(a);

    pg.tau = coordinate_tangents(sig, x, jet);
    pg.g = induced_metric(sig, jet);
    check_spacelike(pg.g, graph.tol().spacelike);
    pg.g_inv = pg.g.inverse();
    pg.sqrt_det_g = std::sqrt(pg.g.determinant());

    pg.frame = orthonormal_frame(pg.tau, sig, graph.tol().frame);

    // e_i = sum_k E(i,k) tau_k, solved with the coordinate Gram matrix.
    pg.frame_coeff = Mat(n, n);
    for (int i = 0; i < n; ++i) {
        Vec b(n);
        for (int k = 0; k < n; ++k) b[k] = inner(pg.frame.tangent[i], pg.tau[k], sig);
        pg.frame_coeff.row(i) = (pg.g_inv * b).transpose();
    }

    // B_ij = normal projection of the second coordinate derivative of F.
    pg.B.assign(n, std::vector<Vec>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Vec s2 = vertical(sig, jet, i, j);
            Vec tang = Vec::Zero(sig.dim());
            for (int k = 0; k < n; ++k) {
                double c = 0.0;
                for (int l = 0; l < n; ++l) c += pg.g_inv(k, l) * inner(s2, pg.tau[l], sig);
                tang += c * pg.tau[k];
            }
            pg.B[i][j] = s2 - tang;
        }

    pg.H = Vec::Zero(sig.dim());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) pg.H += pg.g_inv(i, j) * pg.B[i][j];

    // Frame components. B = h^a_ij e_a with <e_a,e_b> = -delta, so the
    // component extraction carries a sign.
    pg.h.assign(m, Mat::Zero(n, n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Vec bf = Vec::Zero(sig.dim());
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    bf += pg.frame_coeff(i, a) * pg.frame_coeff(j, b) * pg.B[a][b];
            for (int al = 0; al < m; ++al)
                pg.h[al](i, j) = -inner(bf, pg.frame.normal[al], sig);
        }

    pg.H_comp = Vec(m);
    for (int al = 0; al < m; ++al) pg.H_comp[al] = -inner(pg.H, pg.frame.normal[al], sig);

    pg.xcomp = Vec(n);
    for (int i = 0; i < n; ++i) pg.xcomp[i] = inner(pg.F, pg.frame.tangent[i], sig);
    pg.ycomp = Vec(m);
    for (int al = 0; al < m; ++al) pg.ycomp[al] = -inner(pg.F, pg.frame.normal[al], sig);

    pg.FN = pg.F;
    for (int i = 0; i < n; ++i) pg.FN -= pg.xcomp[i] * pg.frame.tangent[i];

    pg.X2 = pg.xcomp.squaredNorm();
    pg.Y2 = pg.ycomp.squaredNorm();
    pg.z = inner(pg.F, pg.F, sig);
    return pg;
}

namespace {

struct MetricDerivatives {
    // dg[k](i,j) = partial_k g_ij and the matching inverse-metric derivative
    std::vector<Mat> dg, dginv;
};

MetricDerivatives metric_derivatives(const Signature& sig, const MapJet& jet, const Mat& g_inv) {
    const int n = sig.n, m = sig.m;
    MetricDerivatives md;
    md.dg.assign(n, Mat::Zero(n, n));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int a = 0; a < m; ++a)
                    md.dg[k](i, j) -= jet.d2(a, i, k) * jet.d1(a, j) + jet.d1(a, i) * jet.d2(a, j, k);
    md.dginv.assign(n, Mat::Zero(n, n));
    for (int k = 0; k < n; ++k) md.dginv[k] = -g_inv * md.dg[k] * g_inv;
    return md;
}

std::vector<Mat> christoffel_from_metric(const Mat& g_inv, const std::vector<Mat>& dg) {
    const int n = static_cast<int>(dg.size());
    std::vector<Mat> gamma(n, Mat::Zero(n, n));  // gamma[l](k,i) = Gamma^l_ki
    for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i) {
                double s = 0.0;
                for (int r = 0; r < n; ++r)
                    s += g_inv(l, r) * (dg[k](i, r) + dg[i](k, r) - dg[r](k, i));
                gamma[l](k, i) = 0.5 * s;
            }
    return gamma;
}

Vec project_normal(const Vec& v, const std::vector<Vec>& tau, const Mat& g_inv,
                   const Signature& sig) {
    const int n = static_cast<int>(tau.size());
    Vec out = v;
    for (int k = 0; k < n; ++k) {
        double c = 0.0;
        for (int l = 0; l < n; ++l) c += g_inv(k, l) * inner(v, tau[l], sig);
        out -= c * tau[k];
    }
    return out;
}

}  // namespace

DerivedTensors derived_tensors(const SpacelikeGraph& graph, const Vec& x) {
    const Signature& sig = graph.sig();
    const int n = sig.n, m = sig.m;
    MapJet jet = graph.f().jets(x, 3);

    DerivedTensors dt;
    dt.pg = point_geometry(graph, x);
    const PointGeometry& pg = dt.pg;

    const MetricDerivatives md = metric_derivatives(sig, jet, pg.g_inv);
    const std::vector<Mat> gamma = christoffel_from_metric(pg.g_inv, md.dg);

    // dB[k][i][j] = partial_k of the ambient representation of B_ij.
    VecGrid3 dB(n, VecGrid2(n, std::vector<Vec>(n)));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Vec s3 = vertical3(sig, jet, i, j, k);
                Vec acc = s3;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) {
                        const Vec s2ij = vertical(sig, jet, i, j);
                        const double c = inner(s2ij, pg.tau[a], sig);
                        const double dc =
                            inner(s3, pg.tau[a], sig) + inner(s2ij, vertical(sig, jet, k, a), sig);
                        acc -= md.dginv[k](a, b) * c * pg.tau[b];
                        acc -= pg.g_inv(a, b) * dc * pg.tau[b];
                        acc -= pg.g_inv(a, b) * c * vertical(sig, jet, k, b);
                    }
                dB[k][i][j] = acc;
            }

    dt.nablaB.assign(n, VecGrid2(n, std::vector<Vec>(n)));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Vec v = project_normal(dB[k][i][j], pg.tau, pg.g_inv, sig);
                for (int l = 0; l < n; ++l)
                    v -= gamma[l](k, i) * pg.B[l][j] + gamma[l](k, j) * pg.B[i][l];
                dt.nablaB[k][i][j] = v;
            }

    dt.nablaH.assign(n, Vec::Zero(sig.dim()));
    for (int k = 0; k < n; ++k) {
        Vec dH = Vec::Zero(sig.dim());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                dH += md.dginv[k](i, j) * pg.B[i][j] + pg.g_inv(i, j) * dB[k][i][j];
        dt.nablaH[k] = project_normal(dH, pg.tau, pg.g_inv, sig);
    }

    dt.S = Mat::Zero(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) dt.S(a, b) += pg.h[a](i, j) * pg.h[b](i, j);
    dt.normB2 = dt.S.trace();
    dt.normH2 = pg.H_comp.squaredNorm();

    dt.P = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int a = 0; a < m; ++a) dt.P(i, j) -= pg.h[a](i, j) * pg.H_comp[a];
    dt.normP2 = dt.P.squaredNorm();

    // All-plus norms of the covariant derivatives via frame components.
    const Mat& E = pg.frame_coeff;
    dt.normNablaB2 = 0.0;
    for (int a = 0; a < m; ++a)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    Vec v = Vec::Zero(sig.dim());
                    for (int p = 0; p < n; ++p)
                        for (int q = 0; q < n; ++q)
                            for (int r = 0; r < n; ++r)
                                v += E(k, p) * E(i, q) * E(j, r) * dt.nablaB[p][q][r];
                    const double comp = -inner(v, pg.frame.normal[a], sig);
                    dt.normNablaB2 += comp * comp;
                }
    dt.normNablaH2 = 0.0;
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i) {
            Vec v = Vec::Zero(sig.dim());
            for (int p = 0; p < n; ++p) v += E(i, p) * dt.nablaH[p];
            const double comp = -inner(v, pg.frame.normal[a], sig);
            dt.normNablaH2 += comp * comp;
        }

    // Normal curvature from the commutator form of the Ricci equation.
    dt.Rperp2 = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) {
                    double c = 0.0;
                    for (int k = 0; k < n; ++k)
                        c += pg.h[a](i, k) * pg.h[b](j, k) - pg.h[a](j, k) * pg.h[b](i, k);
                    dt.Rperp2 += c * c;
                }

    return dt;
}

std::vector<Mat> christoffel(const SpacelikeGraph& graph, const Vec& x) {
    MapJet jet = graph.f().jets(x, 2);
    ChartPoint cp = chart_point(graph, x);
    const MetricDerivatives md = metric_derivatives(graph.sig(), jet, cp.g_inv);
    return christoffel_from_metric(cp.g_inv, md.dg);
}

Vec shrinker_residual(const SpacelikeGraph& graph, const Vec& x) {
    PointGeometry pg = point_geometry(graph, x);
    return pg.H + 0.5 * pg.FN;
}

double shrinker_residual2(const SpacelikeGraph& graph, const Vec& x) {
    const Vec r = shrinker_residual(graph, x);
    const double q = -inner(r, r, graph.sig());
    return q > 0.0 ? q : 0.0;
}

Mat hess_z(const SpacelikeGraph& graph, const Vec& x) {
    PointGeometry pg = point_geometry(graph, x);
    const int n = graph.sig().n;
    Mat Z(n, n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
            Z(k, l) = 2.0 * (pg.g(k, l) + inner(pg.F, pg.B[k][l], graph.sig()));
    return Z;
}

Mat hess_z_frame(const PointGeometry& pg) {
    const int n = static_cast<int>(pg.tau.size());
    const int m = static_cast<int>(pg.frame.normal.size());
    Mat Z = Mat::Identity(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = (i == j) ? 1.0 : 0.0;
            for (int a = 0; a < m; ++a) s -= pg.ycomp[a] * pg.h[a](i, j);
            Z(i, j) = 2.0 * s;
        }
    return Z;
}

LaplaceZ laplace_z(const SpacelikeGraph& graph, const Vec& x) {
    PointGeometry pg = point_geometry(graph, x);
    const int n = graph.sig().n;
    LaplaceZ out;
    out.general = 2.0 * n - 2.0 * pg.ycomp.dot(pg.H_comp);
    out.shrinker_form = 2.0 * n + pg.Y2;
    return out;
}

namespace {

// Value and first derivatives of the tangential projector applied to an
// ambient field V with known derivatives: PV = g^{ab} <V,tau_a> tau_b.
struct ProjectedField {
    Vec normal_part;              // V - PV
    std::vector<Vec> d_normal;    // partial_k of (V - PV)
};

ProjectedField project_with_derivative(const Signature& sig, const MapJet& jet,
                                       const std::vector<Vec>& tau, const Mat& g_inv,
                                       const std::vector<Mat>& dginv, const Vec& V,
                                       const std::vector<Vec>& dV) {
    const int n = sig.n;
    ProjectedField out;
    out.normal_part = V;
    std::vector<double> c(n);
    for (int a = 0; a < n; ++a) c[a] = inner(V, tau[a], sig);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) out.normal_part -= g_inv(a, b) * c[a] * tau[b];

    out.d_normal.assign(n, Vec::Zero(sig.dim()));
    for (int k = 0; k < n; ++k) {
        Vec acc = dV[k];
        for (int a = 0; a < n; ++a) {
            const double dc = inner(dV[k], tau[a], sig) + inner(V, vertical(sig, jet, k, a), sig);
            for (int b = 0; b < n; ++b) {
                acc -= dginv[k](a, b) * c[a] * tau[b];
                acc -= g_inv(a, b) * dc * tau[b];
                acc -= g_inv(a, b) * c[a] * vertical(sig, jet, k, b);
            }
        }
        out.d_normal[k] = acc;
    }
    return out;
}

}  // namespace

VecGrid2 hess_H(const SpacelikeGraph& graph, const Vec& x) {
    const Signature& sig = graph.sig();
    const int n = sig.n;
    MapJet jet = graph.f().jets(x, 4);

    PointGeometry pg = point_geometry(graph, x);
    const MetricDerivatives md = metric_derivatives(sig, jet, pg.g_inv);
    const std::vector<Mat> gamma = christoffel_from_metric(pg.g_inv, md.dg);

    // Second derivative of g_ab and of the inverse metric.
    std::vector<std::vector<Mat>> ddg(n, std::vector<Mat>(n, Mat::Zero(n, n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    for (int al = 0; al < sig.m; ++al)
                        ddg[i][j](a, b) -= jet.d3(al, a, j, i) * jet.d1(al, b) +
                                           jet.d2(al, a, j) * jet.d2(al, b, i) +
                                           jet.d2(al, a, i) * jet.d2(al, b, j) +
                                           jet.d1(al, a) * jet.d3(al, b, j, i);
    std::vector<std::vector<Mat>> ddginv(n, std::vector<Mat>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            ddginv[i][j] = -md.dginv[i] * md.dg[j] * pg.g_inv - pg.g_inv * ddg[i][j] * pg.g_inv -
                           pg.g_inv * md.dg[j] * md.dginv[i];

    // Raw coordinate objects: value, first and second derivatives of the
    // ambient representation of B_kl, then of H.
    VecGrid2 Braw(n, std::vector<Vec>(n));
    VecGrid3 dBraw(n, VecGrid2(n, std::vector<Vec>(n)));
    std::vector<VecGrid3> ddBraw(n, VecGrid3(n, VecGrid2(n, std::vector<Vec>(n))));

    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            const Vec V = vertical(sig, jet, k, l);
            std::vector<Vec> dV(n);
            for (int i = 0; i < n; ++i) dV[i] = vertical3(sig, jet, k, l, i);

            // value and first derivative via the shared projector helper
            ProjectedField pf =
                project_with_derivative(sig, jet, pg.tau, pg.g_inv, md.dginv, V, dV);
            Braw[k][l] = pf.normal_part;
            for (int i = 0; i < n; ++i) dBraw[i][k][l] = pf.d_normal[i];

            // second derivative of the projected field, assembled term by term
            std::vector<double> c(n);
            std::vector<std::vector<double>> dc(n, std::vector<double>(n));
            for (int a = 0; a < n; ++a) {
                c[a] = inner(V, pg.tau[a], sig);
                for (int i = 0; i < n; ++i)
                    dc[i][a] = inner(dV[i], pg.tau[a], sig) +
                               inner(V, vertical(sig, jet, i, a), sig);
            }
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    Vec acc = vertical4(sig, jet, k, l, j, i);
                    for (int a = 0; a < n; ++a) {
                        const double ddc = inner(vertical4(sig, jet, k, l, j, i), pg.tau[a], sig) +
                                           inner(dV[j], vertical(sig, jet, i, a), sig) +
                                           inner(dV[i], vertical(sig, jet, j, a), sig) +
                                           inner(V, vertical3(sig, jet, a, j, i), sig);
                        for (int b = 0; b < n; ++b) {
                            acc -= ddginv[i][j](a, b) * c[a] * pg.tau[b];
                            acc -= md.dginv[j](a, b) * dc[i][a] * pg.tau[b];
                            acc -= md.dginv[j](a, b) * c[a] * vertical(sig, jet, i, b);
                            acc -= md.dginv[i](a, b) * dc[j][a] * pg.tau[b];
                            acc -= pg.g_inv(a, b) * ddc * pg.tau[b];
                            acc -= pg.g_inv(a, b) * dc[j][a] * vertical(sig, jet, i, b);
                            acc -= md.dginv[i](a, b) * c[a] * vertical(sig, jet, j, b);
                            acc -= pg.g_inv(a, b) * dc[i][a] * vertical(sig, jet, j, b);
                            acc -= pg.g_inv(a, b) * c[a] * vertical3(sig, jet, b, j, i);
                        }
                    }
                    ddBraw[i][j][k][l] = acc;
                }
        }

    Vec Hraw = Vec::Zero(sig.dim());
    std::vector<Vec> dHraw(n, Vec::Zero(sig.dim()));
    VecGrid2 ddHraw(n, std::vector<Vec>(n, Vec::Zero(sig.dim())));
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            Hraw += pg.g_inv(k, l) * Braw[k][l];
            for (int j = 0; j < n; ++j)
                dHraw[j] += md.dginv[j](k, l) * Braw[k][l] + pg.g_inv(k, l) * dBraw[j][k][l];
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    ddHraw[i][j] += ddginv[i][j](k, l) * Braw[k][l] +
                                    md.dginv[j](k, l) * dBraw[i][k][l] +
                                    md.dginv[i](k, l) * dBraw[j][k][l] +
                                    pg.g_inv(k, l) * ddBraw[i][j][k][l];
        }

    // W_j = normal part of dH_j, with its first derivatives; then the
    // covariant Hessian subtracts the Christoffel drift.
    VecGrid2 out(n, std::vector<Vec>(n));
    std::vector<ProjectedField> W(n);
    for (int j = 0; j < n; ++j) {
        std::vector<Vec> dV(n);
        for (int i = 0; i < n; ++i) dV[i] = ddHraw[i][j];
        W[j] = project_with_derivative(sig, jet, pg.tau, pg.g_inv, md.dginv, dHraw[j], dV);
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Vec v = project_normal(W[j].d_normal[i], pg.tau, pg.g_inv, sig);
            for (int k = 0; k < n; ++k) v -= gamma[k](i, j) * W[k].normal_part;
            out[i][j] = v;
        }
    return out;
}

}  // namespace spacelike
