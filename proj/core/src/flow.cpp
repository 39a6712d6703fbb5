#include "spacelike/flow.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "spacelike/errors.hpp"

namespace spacelike {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMetricMargin = 0.05;

struct GridView {
    const FlowState& st;
    int N;
    double dx;

    explicit GridView(const FlowState& s) : st(s), N(s.nodes_per_axis), dx(s.dx()) {}

    int wrap(int i) const { return (i % N + N) % N; }
    long idx1(int i) const { return wrap(i); }
    long idx2(int i, int j) const { return wrap(i) + static_cast<long>(N) * wrap(j); }
};

// first and second derivatives of component a at a node, periodic stencils
struct NodeDerivs {
    double f;
    double d1[2];
    double d2[2][2];
};

NodeDerivs node_derivs_1d(const FlowState& st, int a, int i) {
    GridView gv(st);
    const auto& v = st.values[a];
    NodeDerivs nd{};
    nd.f = v[gv.idx1(i)];
    const double fp = v[gv.idx1(i + 1)], fm = v[gv.idx1(i - 1)];
    nd.d1[0] = (fp - fm) / (2.0 * gv.dx);
    nd.d2[0][0] = (fp - 2.0 * nd.f + fm) / (gv.dx * gv.dx);
    return nd;
}

NodeDerivs node_derivs_2d(const FlowState& st, int a, int i, int j) {
    GridView gv(st);
    const auto& v = st.values[a];
    NodeDerivs nd{};
    nd.f = v[gv.idx2(i, j)];
    const double fxp = v[gv.idx2(i + 1, j)], fxm = v[gv.idx2(i - 1, j)];
    const double fyp = v[gv.idx2(i, j + 1)], fym = v[gv.idx2(i, j - 1)];
    nd.d1[0] = (fxp - fxm) / (2.0 * gv.dx);
    nd.d1[1] = (fyp - fym) / (2.0 * gv.dx);
    nd.d2[0][0] = (fxp - 2.0 * nd.f + fxm) / (gv.dx * gv.dx);
    nd.d2[1][1] = (fyp - 2.0 * nd.f + fym) / (gv.dx * gv.dx);
    const double fpp = v[gv.idx2(i + 1, j + 1)], fpm = v[gv.idx2(i + 1, j - 1)];
    const double fmp = v[gv.idx2(i - 1, j + 1)], fmm = v[gv.idx2(i - 1, j - 1)];
    nd.d2[0][1] = nd.d2[1][0] = (fpp - fpm - fmp + fmm) / (4.0 * gv.dx * gv.dx);
    return nd;
}

struct NodeMetric {
    double g[2][2];
    double ginv[2][2];
    double min_eig;
};

NodeMetric node_metric(int n, int m, const NodeDerivs* nds) {
    NodeMetric nm{};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = (i == j) ? 1.0 : 0.0;
            for (int a = 0; a < m; ++a) s -= nds[a].d1[i] * nds[a].d1[j];
            nm.g[i][j] = s;
        }
    if (n == 1) {
        nm.min_eig = nm.g[0][0];
        nm.ginv[0][0] = 1.0 / nm.g[0][0];
    } else {
        const double tr = nm.g[0][0] + nm.g[1][1];
        const double det = nm.g[0][0] * nm.g[1][1] - nm.g[0][1] * nm.g[1][0];
        const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
        nm.min_eig = 0.5 * tr - disc;
        nm.ginv[0][0] = nm.g[1][1] / det;
        nm.ginv[1][1] = nm.g[0][0] / det;
        nm.ginv[0][1] = nm.ginv[1][0] = -nm.g[0][1] / det;
    }
    return nm;
}

// indefinite inner product on R^{n+m}_m for the small stack vectors below
double amb_inner(int n, int m, const double* u, const double* v) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += u[i] * v[i];
    for (int a = 0; a < m; ++a) s -= u[n + a] * v[n + a];
    return s;
}

}  // namespace

FlowState flat_state(int n, int m, double L, int nodes_per_axis) {
    if (n < 1 || n > 2) throw InvalidArgument("flow: n must be 1 or 2");
    if (m < 1) throw InvalidArgument("flow: m must be >= 1");
    if (nodes_per_axis < 8) throw InvalidArgument("flow: grid too coarse");
    FlowState st;
    st.n = n;
    st.m = m;
    st.L = L;
    st.nodes_per_axis = nodes_per_axis;
    st.values.assign(m, std::vector<double>(st.node_count(), 0.0));
    return st;
}

FlowState perturbed_state(int n, int m, double L, int nodes_per_axis, double eps,
                          std::uint64_t seed, int max_wavenumber) {
    FlowState st = flat_state(n, m, L, nodes_per_axis);
    std::mt19937_64 rng(seed);
    auto unit = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    const int K = max_wavenumber;
    const int N = nodes_per_axis;
    for (int a = 0; a < m; ++a) {
        if (n == 1) {
            std::vector<double> c(K);
            for (int k = 0; k < K; ++k) c[k] = 2.0 * unit() - 1.0;
            for (int i = 0; i < N; ++i) {
                const double x = st.coord(i);
                double s = 0.0;
                for (int k = 0; k < K; ++k) s += c[k] * std::sin(2.0 * kPi * (k + 1) * x / L);
                st.values[a][i] = s;
            }
        } else {
            std::vector<double> c(K * K);
            for (auto& ck : c) ck = 2.0 * unit() - 1.0;
            for (int j = 0; j < N; ++j)
                for (int i = 0; i < N; ++i) {
                    const double x = st.coord(i), y = st.coord(j);
                    double s = 0.0;
                    for (int kx = 0; kx < K; ++kx)
                        for (int ky = 0; ky < K; ++ky)
                            s += c[kx * K + ky] * std::sin(2.0 * kPi * (kx + 1) * x / L) *
                                 std::sin(2.0 * kPi * (ky + 1) * y / L);
                    st.values[a][i + static_cast<long>(N) * j] = s;
                }
        }
    }
    double sup = 0.0;
    for (const auto& comp : st.values)
        for (double v : comp) sup = std::max(sup, std::abs(v));
    if (sup > 0.0)
        for (auto& comp : st.values)
            for (double& v : comp) v *= eps / sup;
    return st;
}

FlowDiagnostics flow_diagnostics(const FlowState& state) {
    const int n = state.n, m = state.m, N = state.nodes_per_axis;
    const int dim = n + m;
    FlowDiagnostics d;
    d.min_metric_eig = std::numeric_limits<double>::infinity();

    std::vector<NodeDerivs> nds(m);
    double tau[2][8];  // tangents as ambient stack vectors (dim <= 8)
    double S[2][2][8];

    auto visit = [&](int i, int j) {
        for (int a = 0; a < m; ++a)
            nds[a] = (n == 1) ? node_derivs_1d(state, a, i) : node_derivs_2d(state, a, i, j);
        const NodeMetric nm = node_metric(n, m, nds.data());
        d.min_metric_eig = std::min(d.min_metric_eig, nm.min_eig);

        double F[8] = {0};
        F[0] = state.coord(i);
        if (n == 2) F[1] = state.coord(j);
        for (int a = 0; a < m; ++a) {
            F[n + a] = nds[a].f;
            d.sup_f = std::max(d.sup_f, std::abs(nds[a].f));
        }
        for (int p = 0; p < n; ++p) {
            for (int q = 0; q < dim; ++q) tau[p][q] = 0.0;
            tau[p][p] = 1.0;
            for (int a = 0; a < m; ++a) tau[p][n + a] = nds[a].d1[p];
        }
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) {
                for (int r = 0; r < dim; ++r) S[p][q][r] = 0.0;
                for (int a = 0; a < m; ++a) S[p][q][n + a] = nds[a].d2[p][q];
            }

        auto project_normal = [&](double* v) {
            double coef[2];
            for (int p = 0; p < n; ++p) {
                coef[p] = 0.0;
                for (int q = 0; q < n; ++q) coef[p] += nm.ginv[p][q] * amb_inner(n, m, v, tau[q]);
            }
            for (int p = 0; p < n; ++p)
                for (int r = 0; r < dim; ++r) v[r] -= coef[p] * tau[p][r];
        };

        // |B|^2 with all-plus squares: -sum g^{ip} g^{jq} <B_ij, B_pq>
        double Bv[2][2][8];
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) {
                for (int r = 0; r < dim; ++r) Bv[p][q][r] = S[p][q][r];
                project_normal(Bv[p][q]);
            }
        double b2 = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
                for (int r = 0; r < n; ++r)
                    for (int s = 0; s < n; ++s)
                        b2 -= nm.ginv[p][r] * nm.ginv[q][s] * amb_inner(n, m, Bv[p][q], Bv[r][s]);
        d.sup_B = std::max(d.sup_B, std::sqrt(std::max(0.0, b2)));

        // residual H + F^N/2 with H = (g^{ij} S_ij)^N
        double Hv[8] = {0};
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
                for (int r = 0; r < dim; ++r) Hv[r] += nm.ginv[p][q] * S[p][q][r];
        project_normal(Hv);
        double FN[8];
        for (int r = 0; r < dim; ++r) FN[r] = F[r];
        project_normal(FN);
        double R[8];
        for (int r = 0; r < dim; ++r) R[r] = Hv[r] + 0.5 * FN[r];
        const double r2 = -amb_inner(n, m, R, R);
        d.sup_residual = std::max(d.sup_residual, std::sqrt(std::max(0.0, r2)));
    };

    if (n == 1)
        for (int i = 0; i < N; ++i) visit(i, 0);
    else
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i) visit(i, j);
    return d;
}

double stable_dt(const FlowState& state, double safety) {
    const FlowDiagnostics d = flow_diagnostics(state);
    if (d.min_metric_eig <= kMetricMargin)
        throw FlowHaltError("stable_dt: state is not safely space-like (min metric eigenvalue " +
                            std::to_string(d.min_metric_eig) + ")");
    const double c = 1.0 / (2.0 * state.n);
    return safety * c * d.min_metric_eig * state.dx() * state.dx();
}

void flow_step(FlowState& state, double dt) {
    const int n = state.n, m = state.m, N = state.nodes_per_axis;
    std::vector<std::vector<double>> delta(m, std::vector<double>(state.node_count()));
    std::vector<NodeDerivs> nds(m);
    double worst_eig = std::numeric_limits<double>::infinity();

    auto visit = [&](int i, int j, long idx) {
        for (int a = 0; a < m; ++a)
            nds[a] = (n == 1) ? node_derivs_1d(state, a, i) : node_derivs_2d(state, a, i, j);
        const NodeMetric nm = node_metric(n, m, nds.data());
        worst_eig = std::min(worst_eig, nm.min_eig);
        double x[2] = {state.coord(i), (n == 2) ? state.coord(j) : 0.0};
        for (int a = 0; a < m; ++a) {
            double lap = 0.0;
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q) lap += nm.ginv[p][q] * nds[a].d2[p][q];
            double drift = nds[a].f;
            for (int p = 0; p < n; ++p) drift -= x[p] * nds[a].d1[p];
            delta[a][idx] = lap + 0.5 * drift;
        }
    };

    if (n == 1)
        for (int i = 0; i < N; ++i) visit(i, 0, i);
    else
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i) visit(i, j, i + static_cast<long>(N) * j);

    if (worst_eig <= kMetricMargin)
        throw FlowHaltError("flow_step: space-likeness margin lost (min metric eigenvalue " +
                            std::to_string(worst_eig) + " at tau " + std::to_string(state.tau) +
                            ")");

    for (int a = 0; a < m; ++a)
        for (long idx = 0; idx < state.node_count(); ++idx) {
            state.values[a][idx] += dt * delta[a][idx];
            if (!std::isfinite(state.values[a][idx]))
                throw FlowHaltError("flow_step: state diverged at tau " +
                                    std::to_string(state.tau));
        }
    state.tau += dt;
}

FlowRunReport relax_to_shrinker(FlowState& state, const FlowStopRule& stop) {
    FlowRunReport rep;
    double dt = stable_dt(state);
    for (long k = 0; k < stop.max_steps; ++k) {
        if (k % stop.diag_stride == 0) {
            const FlowDiagnostics d = flow_diagnostics(state);
            rep.tau_history.push_back(state.tau);
            rep.history.push_back(d);
            rep.terminal = d;
            if (d.sup_residual < stop.residual_tol) {
                rep.converged = true;
                break;
            }
            if (d.sup_B < stop.affine_tol) break;
            // track the stability bound as the metric evolves
            dt = stable_dt(state);
        }
        flow_step(state, dt);
        rep.steps = k + 1;
    }
    rep.terminal = flow_diagnostics(state);
    rep.tau_history.push_back(state.tau);
    rep.history.push_back(rep.terminal);
    rep.converged = rep.converged || rep.terminal.sup_residual < stop.residual_tol;
    rep.affine = rep.terminal.sup_B < stop.affine_tol;
    return rep;
}

void FlowRunReport::history_to_csv(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("FlowRunReport::history_to_csv: cannot open " + path);
    std::fprintf(f, "tau,sup_B,sup_residual,min_metric_eig\n");
    for (std::size_t i = 0; i < history.size(); ++i)
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", tau_history[i], history[i].sup_B,
                     history[i].sup_residual, history[i].min_metric_eig);
    std::fclose(f);
}

void state_to_csv(const FlowState& state, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("state_to_csv: cannot open " + path);
    const int N = state.nodes_per_axis;
    if (state.n == 1) {
        std::fprintf(f, "x");
        for (int a = 0; a < state.m; ++a) std::fprintf(f, ",f%d", a);
        std::fprintf(f, "\n");
        for (int i = 0; i < N; ++i) {
            std::fprintf(f, "%.17g", state.coord(i));
            for (int a = 0; a < state.m; ++a) std::fprintf(f, ",%.17g", state.values[a][i]);
            std::fprintf(f, "\n");
        }
    } else {
        std::fprintf(f, "x,y");
        for (int a = 0; a < state.m; ++a) std::fprintf(f, ",f%d", a);
        std::fprintf(f, "\n");
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i) {
                std::fprintf(f, "%.17g,%.17g", state.coord(i), state.coord(j));
                for (int a = 0; a < state.m; ++a)
                    std::fprintf(f, ",%.17g", state.values[a][i + static_cast<long>(N) * j]);
                std::fprintf(f, "\n");
            }
    }
    std::fclose(f);
}

}  // namespace spacelike
