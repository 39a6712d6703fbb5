#include "spacelike/drift.hpp"

#include <cmath>
#include <limits>

namespace spacelike {

namespace {

double field_step(const Vec& x, const FdOptions& opt) {
    return opt.step * std::max(1.0, x.cwiseAbs().maxCoeff());
}

double partial_fd(const ScalarField& field, const Vec& x, int j, double h) {
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    return (field.eval(xp) - field.eval(xm)) / (2.0 * h);
}

// divergence-form Laplacian at a fixed stencil step; weighted == true uses
// the density e^{-z/4} sqrt(g) instead of sqrt(g)
double div_form_fixed(const SpacelikeGraph& graph, const ScalarField& field, const Vec& x,
                      double h, bool weighted) {
    const int n = graph.sig().n;
    const ChartPoint c0 = chart_point(graph, x);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        for (double sgn : {1.0, -1.0}) {
            Vec y = x;
            y[i] += sgn * h;
            const ChartPoint cy = chart_point(graph, y);
            double flux = 0.0;
            for (int j = 0; j < n; ++j) flux += cy.g_inv(i, j) * partial_fd(field, y, j, h);
            flux *= cy.sqrt_det_g;
            if (weighted) flux *= std::exp(-cy.z / 4.0);
            acc += sgn * flux;
        }
    }
    acc /= (2.0 * h) * c0.sqrt_det_g;
    if (weighted) acc *= std::exp(c0.z / 4.0);
    return acc;
}

double richardson2(double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; }

}  // namespace

ScalarField field_z(std::shared_ptr<const SpacelikeGraph> graph) {
    return {[g = std::move(graph)](const Vec& x) { return chart_point(*g, x).z; }, 4};
}

ScalarField field_norm_B2(std::shared_ptr<const SpacelikeGraph> graph) {
    return {[g = std::move(graph)](const Vec& x) {
                PointGeometry pg = point_geometry(*g, x);
                double s = 0.0;
                for (const Mat& hm : pg.h) s += hm.squaredNorm();
                return s;
            },
            2};
}

ScalarField field_norm_H2(std::shared_ptr<const SpacelikeGraph> graph) {
    return {[g = std::move(graph)](const Vec& x) {
                return point_geometry(*g, x).H_comp.squaredNorm();
            },
            2};
}

namespace {

// w as a field: |det <e_i, a_j>| over the deterministic frame; equals the
// canonicalized det of angle_data but avoids the SVD in inner FD loops.
double w_value(const SpacelikeGraph& graph, const Vec& x, const GrassmannPoint& A) {
    PointGeometry pg = point_geometry(graph, x);
    const int n = graph.sig().n;
    Mat W(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            W(i, j) = inner(pg.frame.tangent[i], A.basis()[j], graph.sig());
    return std::abs(W.determinant());
}

}  // namespace

ScalarField field_w(std::shared_ptr<const SpacelikeGraph> graph, GrassmannPoint reference) {
    return {[g = std::move(graph), A = std::move(reference)](const Vec& x) {
                return w_value(*g, x, A);
            },
            4};
}

ScalarField field_log_w(std::shared_ptr<const SpacelikeGraph> graph, GrassmannPoint reference) {
    return {[g = std::move(graph), A = std::move(reference)](const Vec& x) {
                return std::log(w_value(*g, x, A));
            },
            4};
}

Vec chart_gradient_fd(const ScalarField& field, const Vec& x, const FdOptions& opt) {
    const double h = field_step(x, opt);
    Vec grad(x.size());
    for (int j = 0; j < x.size(); ++j) {
        const double c = partial_fd(field, x, j, h);
        grad[j] = opt.richardson ? richardson2(c, partial_fd(field, x, j, h / 2.0)) : c;
    }
    return grad;
}

double laplace_beltrami_fd(const SpacelikeGraph& graph, const ScalarField& field, const Vec& x,
                           const FdOptions& opt) {
    const double h = field_step(x, opt);
    const double coarse = div_form_fixed(graph, field, x, h, false);
    if (!opt.richardson) return coarse;
    return richardson2(coarse, div_form_fixed(graph, field, x, h / 2.0, false));
}

double drift_inner_fd(const SpacelikeGraph& graph, const ScalarField& field, const Vec& x,
                      const FdOptions& opt) {
    const ChartPoint cp = chart_point(graph, x);
    const Vec grad = chart_gradient_fd(field, x, opt);
    const int n = graph.sig().n;
    double acc = 0.0;
    for (int a = 0; a < n; ++a) {
        const double fa = inner(cp.F, cp.tau[a], graph.sig());
        for (int b = 0; b < n; ++b) acc += fa * cp.g_inv(a, b) * grad[b];
    }
    return acc;
}

double drift_laplacian(const SpacelikeGraph& graph, const ScalarField& field, const Vec& x,
                       const FdOptions& opt) {
    return laplace_beltrami_fd(graph, field, x, opt) -
           0.5 * drift_inner_fd(graph, field, x, opt);
}

double drift_laplacian_weighted_form(const SpacelikeGraph& graph, const ScalarField& field,
                                     const Vec& x, const FdOptions& opt) {
    const double h = field_step(x, opt);
    const double coarse = div_form_fixed(graph, field, x, h, true);
    if (!opt.richardson) return coarse;
    return richardson2(coarse, div_form_fixed(graph, field, x, h / 2.0, true));
}

std::vector<IdentityId> identity_catalogue() {
    return {IdentityId::Dez, IdentityId::NablaFN, IdentityId::HessH, IdentityId::DLB,
            IdentityId::DLH, IdentityId::Nw,      IdentityId::Dew,   IdentityId::DLw,
            IdentityId::LogwIneq, IdentityId::Simons};
}

const char* identity_name(IdentityId id) {
    switch (id) {
        case IdentityId::Dez: return "ID-Dez";
        case IdentityId::NablaFN: return "ID-nablaFN";
        case IdentityId::HessH: return "ID-HessH";
        case IdentityId::DLB: return "ID-dLB";
        case IdentityId::DLH: return "ID-dLH";
        case IdentityId::Nw: return "ID-nw";
        case IdentityId::Dew: return "ID-Dew";
        case IdentityId::DLw: return "ID-dLw";
        case IdentityId::LogwIneq: return "INEQ-logw";
        case IdentityId::Simons: return "ID-Simons";
    }
    return "ID-unknown";
}

bool identity_needs_shrinker(IdentityId id) {
    switch (id) {
        case IdentityId::NablaFN:
        case IdentityId::Nw:
            return false;
        default:
            return true;
    }
}

namespace {

double max_abs(const Vec& v) { return v.cwiseAbs().maxCoeff(); }

// helpers shared by the per-identity evaluators
struct WContext {
    GrassmannPoint A;
    ScalarField w_field;
    ScalarField logw_field;
};

Vec project_normal_at(const ChartPoint& cp, const Vec& v, const Signature& sig) {
    const int n = static_cast<int>(cp.tau.size());
    Vec out = v;
    for (int k = 0; k < n; ++k) {
        double c = 0.0;
        for (int l = 0; l < n; ++l) c += cp.g_inv(k, l) * inner(v, cp.tau[l], sig);
        out -= c * cp.tau[k];
    }
    return out;
}

// FD derivative of an ambient-vector field along chart direction i
template <typename F>
Vec vec_partial_fd(const F& fn, const Vec& x, int i, double h, bool richardson) {
    auto central = [&](double step) {
        Vec xp = x, xm = x;
        xp[i] += step;
        xm[i] -= step;
        return Vec((fn(xp) - fn(xm)) / (2.0 * step));
    };
    const Vec c = central(h);
    if (!richardson) return c;
    return (4.0 * central(h / 2.0) - c) / 3.0;
}

double residual_dez(const SpacelikeGraph& graph, const Vec& x, const ScalarField& zf,
                    const VerifyOptions& opt) {
    PointGeometry pg = point_geometry(graph, x);
    const double lhs = laplace_beltrami_fd(graph, zf, x, opt.fd);
    const double rhs = 2.0 * graph.sig().n + pg.Y2;
    return std::abs(lhs - rhs);
}

double residual_nabla_fn(const SpacelikeGraph& graph, const Vec& x, const VerifyOptions& opt) {
    const Signature& sig = graph.sig();
    const int n = sig.n;
    PointGeometry pg = point_geometry(graph, x);
    ChartPoint c0 = chart_point(graph, x);
    auto fn_field = [&graph, &sig](const Vec& y) {
        ChartPoint cp = chart_point(graph, y);
        return Vec(project_normal_at(cp, cp.F, sig));
    };
    const double h = field_step(x, opt.fd);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const Vec dFN = vec_partial_fd(fn_field, x, i, h, opt.fd.richardson);
        const Vec lhs = project_normal_at(c0, dFN, sig);
        Vec rhs = Vec::Zero(sig.dim());
        for (int a = 0; a < n; ++a) {
            const double fa = inner(pg.F, pg.tau[a], sig);
            for (int b = 0; b < n; ++b) rhs -= fa * pg.g_inv(a, b) * pg.B[b][i];
        }
        worst = std::max(worst, max_abs(lhs - rhs));
    }
    return worst;
}

double residual_hess_h(const SpacelikeGraph& graph, const Vec& x, const VerifyOptions& opt) {
    const Signature& sig = graph.sig();
    const int n = sig.n;
    DerivedTensors dt = derived_tensors(graph, x);
    const PointGeometry& pg = dt.pg;
    const std::vector<Mat> gamma = christoffel(graph, x);
    ChartPoint c0 = chart_point(graph, x);

    auto nh_field = [&graph](const Vec& y) { return derived_tensors(graph, y).nablaH; };
    const double h = field_step(x, opt.fd);

    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        auto vj = [&nh_field, j](const Vec& y) { return nh_field(y)[j]; };
        for (int i = 0; i < n; ++i) {
            Vec lhs = project_normal_at(c0, vec_partial_fd(vj, x, i, h, opt.fd.richardson), sig);
            for (int k = 0; k < n; ++k) lhs -= gamma[k](i, j) * dt.nablaH[k];

            Vec rhs = 0.5 * pg.B[i][j];
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    rhs -= pg.g_inv(k, l) * inner(pg.B[k][i], pg.H, sig) * pg.B[l][j];
                    rhs += 0.5 * inner(pg.F, pg.tau[k], sig) * pg.g_inv(k, l) *
                           dt.nablaB[l][i][j];
                }
            worst = std::max(worst, max_abs(lhs - rhs));
        }
    }
    return worst;
}

double residual_dlb(const SpacelikeGraph& graph, const Vec& x, const ScalarField& b2f,
                    const VerifyOptions& opt) {
    DerivedTensors dt = derived_tensors(graph, x);
    const double lhs = drift_laplacian(graph, b2f, x, opt.fd);
    const double rhs =
        dt.normB2 + 2.0 * dt.Rperp2 + 2.0 * dt.S.squaredNorm() + 2.0 * dt.normNablaB2;
    return std::abs(lhs - rhs);
}

double residual_dlh(const SpacelikeGraph& graph, const Vec& x, const ScalarField& h2f,
                    const VerifyOptions& opt) {
    DerivedTensors dt = derived_tensors(graph, x);
    const double lhs = drift_laplacian(graph, h2f, x, opt.fd);
    const double rhs = dt.normH2 + 2.0 * dt.normP2 + 2.0 * dt.normNablaH2;
    return std::abs(lhs - rhs);
}

AngleData tangent_angles(const PointGeometry& pg, const GrassmannPoint& A, const Signature& sig) {
    GrassmannPoint P(pg.frame.tangent, sig);
    AngleData ad = angle_data(P, A);
    if (ad.flipped)
        throw ChartError(
            "identity verification: tangent frame came out opposite to the reference "
            "orientation; choose a reference plane aligned with the chart");
    return ad;
}

double residual_nw(const SpacelikeGraph& graph, const Vec& x, const WContext& wc,
                   const VerifyOptions& opt) {
    const Signature& sig = graph.sig();
    const int n = sig.n, m = sig.m;
    PointGeometry pg = point_geometry(graph, x);
    AngleData ad = tangent_angles(pg, wc.A, sig);
    const Vec grad = chart_gradient_fd(wc.w_field, x, opt.fd);

    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        double lhs = 0.0;
        for (int k = 0; k < n; ++k) lhs += pg.frame_coeff(j, k) * grad[k];
        double rhs = 0.0;
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < m; ++a)
                rhs += pg.h[a](i, j) * w_replacement(ad, wc.A, i, pg.frame.normal[a]);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

double residual_dew(const SpacelikeGraph& graph, const Vec& x, const WContext& wc,
                    const VerifyOptions& opt) {
    const Signature& sig = graph.sig();
    const int n = sig.n, m = sig.m;
    PointGeometry pg = point_geometry(graph, x);
    DerivedTensors dt = derived_tensors(graph, x);
    AngleData ad = tangent_angles(pg, wc.A, sig);
    const double w = wc.w_field.eval(x);

    const double lhs = laplace_beltrami_fd(graph, wc.w_field, x, opt.fd);

    double repl = 0.0;
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            if (k == l) continue;
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) {
                    double hh = 0.0;
                    for (int i = 0; i < n; ++i) hh += pg.h[a](i, k) * pg.h[b](i, l);
                    if (hh == 0.0) continue;
                    repl += hh * w_double_replacement(ad, wc.A, k, pg.frame.normal[a], l,
                                                      pg.frame.normal[b]);
                }
        }

    const double drift = drift_inner_fd(graph, wc.w_field, x, opt.fd);
    const double rhs = dt.normB2 * w + repl + 0.5 * drift;
    return std::abs(lhs - rhs);
}

double residual_dlw(const SpacelikeGraph& graph, const Vec& x, const WContext& wc,
                    const VerifyOptions& opt) {
    const Signature& sig = graph.sig();
    const int n = sig.n, m = sig.m;
    PointGeometry pg = point_geometry(graph, x);
    DerivedTensors dt = derived_tensors(graph, x);
    AngleData ad = tangent_angles(pg, wc.A, sig);
    const double w = wc.w_field.eval(x);

    const double lhs = drift_laplacian(graph, wc.w_field, x, opt.fd);

    // h in the aligned frames: rotate tangent indices into the adapted
    // basis and expand the adapted normals over the deterministic ones
    Mat U(n, n);  // U(k,a) = <aligned_a, e_k>
    for (int k = 0; k < n; ++k)
        for (int a = 0; a < n; ++a)
            U(k, a) = inner(ad.aligned_tangent[a], pg.frame.tangent[k], sig);
    Mat T(m, m);  // T(s,al) = -<aligned normal_s, e_al>
    for (int s = 0; s < m; ++s)
        for (int al = 0; al < m; ++al)
            T(s, al) = -inner(ad.aligned_normal[s], pg.frame.normal[al], sig);

    std::vector<Mat> ht(m, Mat::Zero(n, n));
    for (int s = 0; s < m; ++s)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                double acc = 0.0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        for (int al = 0; al < m; ++al)
                            acc += U(i, a) * U(j, b) * T(s, al) * pg.h[al](i, j);
                ht[s](a, b) = acc;
            }

    double sum = 0.0;
    const int kl_max = std::min(n, m);
    for (int k = 0; k < kl_max; ++k)
        for (int l = 0; l < kl_max; ++l) {
            if (k == l) continue;
            for (int i = 0; i < n; ++i)
                sum += ad.lambdas[k] * ad.lambdas[l] *
                       (ht[k](i, k) * ht[l](i, l) - ht[l](i, k) * ht[k](i, l));
        }
    const double rhs = dt.normB2 * w + sum * w;
    return std::abs(lhs - rhs);
}

struct IneqResult {
    double residual, slack;
};

IneqResult residual_logw(const SpacelikeGraph& graph, const Vec& x, const WContext& wc,
                         const VerifyOptions& opt) {
    PointGeometry pg = point_geometry(graph, x);
    DerivedTensors dt = derived_tensors(graph, x);
    AngleData ad = tangent_angles(pg, wc.A, graph.sig());
    const double w = wc.w_field.eval(x);

    const double lhs = drift_laplacian(graph, wc.logw_field, x, opt.fd);
    double prod = 1.0;
    for (double la : ad.lambdas) prod *= (1.0 - la * la);
    const double bound1 = dt.normB2 / (w * w);
    const double bound2 = prod * dt.normB2;
    const double slack = std::min(lhs - bound1, lhs - bound2);
    return {std::max(0.0, -slack), slack};
}

double residual_simons(const SpacelikeGraph& graph, const Vec& x, const ScalarField& b2f,
                       const VerifyOptions& opt) {
    const Signature& sig = graph.sig();
    const int n = sig.n;
    DerivedTensors dt = derived_tensors(graph, x);
    const PointGeometry& pg = dt.pg;

    const double lhs = laplace_beltrami_fd(graph, b2f, x, opt.fd);

    // analytic gradient of |B|^2: d_b |B|^2 = -2 g^{ia} g^{jc} <nabla_b B_ij, B_ac>
    Vec gradB2 = Vec::Zero(n);
    for (int b = 0; b < n; ++b) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < n; ++a)
                for (int j = 0; j < n; ++j)
                    for (int c = 0; c < n; ++c)
                        acc += pg.g_inv(i, a) * pg.g_inv(j, c) *
                               inner(dt.nablaB[b][i][j], pg.B[a][c], sig);
        gradB2[b] = -2.0 * acc;
    }
    double fgrad = 0.0;
    for (int a = 0; a < n; ++a) {
        const double fa = inner(pg.F, pg.tau[a], sig);
        for (int b = 0; b < n; ++b) fgrad += fa * pg.g_inv(a, b) * gradB2[b];
    }

    const double rhs = dt.normB2 + 0.5 * fgrad + 2.0 * dt.Rperp2 + 2.0 * dt.S.squaredNorm() +
                       2.0 * dt.normNablaB2;
    return std::abs(lhs - rhs);
}

}  // namespace

IdentityReport verify_identity(const LiftedShrinker& member, IdentityId id,
                               const std::vector<Vec>& samples, const VerifyOptions& opt) {
    const SpacelikeGraph& graph = *member.graph;
    const Signature& sig = graph.sig();

    if (identity_needs_shrinker(id)) {
        double worst = 0.0;
        for (const Vec& x : samples)
            worst = std::max(worst, std::sqrt(shrinker_residual2(*member.trajectory_graph, x)));
        if (worst >= opt.shrinker_gate)
            throw NotAShrinkerError("verify_identity: sample set violates the shrinker equation "
                                    "(worst residual " +
                                        std::to_string(worst) + ")",
                                    worst);
    }

    WContext wc{GrassmannPoint::coordinate_plane(sig), {}, {}};
    wc.w_field = field_w(member.graph, wc.A);
    wc.logw_field = field_log_w(member.graph, wc.A);
    const ScalarField zf = field_z(member.graph);
    const ScalarField b2f = field_norm_B2(member.graph);
    const ScalarField h2f = field_norm_H2(member.graph);

    IdentityReport rep;
    rep.id = identity_name(id);
    rep.n = sig.n;
    rep.m = sig.m;
    rep.samples = static_cast<int>(samples.size());
    rep.tolerance = (id == IdentityId::LogwIneq) ? opt.ineq_slack : opt.tolerance;
    rep.min_slack = std::numeric_limits<double>::infinity();

    double sup = 0.0, sq = 0.0;
    for (const Vec& x : samples) {
        double r = 0.0;
        switch (id) {
            case IdentityId::Dez: r = residual_dez(graph, x, zf, opt); break;
            case IdentityId::NablaFN: r = residual_nabla_fn(graph, x, opt); break;
            case IdentityId::HessH: r = residual_hess_h(graph, x, opt); break;
            case IdentityId::DLB: r = residual_dlb(graph, x, b2f, opt); break;
            case IdentityId::DLH: r = residual_dlh(graph, x, h2f, opt); break;
            case IdentityId::Nw: r = residual_nw(graph, x, wc, opt); break;
            case IdentityId::Dew: r = residual_dew(graph, x, wc, opt); break;
            case IdentityId::DLw: r = residual_dlw(graph, x, wc, opt); break;
            case IdentityId::LogwIneq: {
                const IneqResult ir = residual_logw(graph, x, wc, opt);
                r = ir.residual;
                rep.min_slack = std::min(rep.min_slack, ir.slack);
                break;
            }
            case IdentityId::Simons: r = residual_simons(graph, x, b2f, opt); break;
        }
        sup = std::max(sup, r);
        sq += r * r;
    }
    rep.sup_residual = sup;
    rep.rms_residual = samples.empty() ? 0.0 : std::sqrt(sq / samples.size());
    rep.pass = sup < rep.tolerance;
    return rep;
}

std::vector<IdentityReport> verify_all_identities(const LiftedShrinker& member,
                                                  const std::vector<Vec>& samples,
                                                  const VerifyOptions& opt) {
    std::vector<IdentityReport> out;
    for (IdentityId id : identity_catalogue()) out.push_back(verify_identity(member, id, samples, opt));
    return out;
}

}  // namespace spacelike
