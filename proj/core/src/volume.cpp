#include "spacelike/volume.hpp"

#include <cmath>
#include <cstdio>

namespace spacelike {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Shrinker-exact curve fields at arclength s: z, |H|^2 of the curve factor.
struct CurveFactor {
    double z, H2;
};

CurveFactor curve_factor(const ShrinkerCurve& c, double s) {
    const Eigen::Vector3d y = c.y(s);
    const double sh = std::sinh(y[2]), ch = std::cosh(y[2]);
    const double v = y[0] * sh - y[1] * ch;
    CurveFactor out;
    out.z = y[0] * y[0] - y[1] * y[1];
    out.H2 = 0.25 * v * v;
    return out;
}

// Intrinsic charts carry |H|^2 and |P|^2 alongside z for the probe.
class FieldsChart : public IntegrationChart {
public:
    virtual void fields(const Vec& param, double& z, double& weight, double& H2,
                        double& P2) const = 0;
    void eval(const Vec& param, double& z, double& weight) const override {
        double H2, P2;
        fields(param, z, weight, H2, P2);
    }
};

class CurveChart final : public FieldsChart {
public:
    CurveChart(std::shared_ptr<const ShrinkerCurve> c, double s_lo, double s_hi)
        : c_(std::move(c)), s_lo_(s_lo), s_hi_(s_hi) {}
    int dim() const override { return 1; }
    void bounds(Vec& lo, Vec& hi) const override {
        lo = Vec::Constant(1, s_lo_);
        hi = Vec::Constant(1, s_hi_);
    }
    void fields(const Vec& p, double& z, double& weight, double& H2, double& P2) const override {
        const CurveFactor f = curve_factor(*c_, p[0]);
        z = f.z;
        weight = 1.0;
        H2 = f.H2;
        P2 = f.H2 * f.H2;
    }

private:
    std::shared_ptr<const ShrinkerCurve> c_;
    double s_lo_, s_hi_;
};

class CylinderChart final : public FieldsChart {
public:
    CylinderChart(std::shared_ptr<const ShrinkerCurve> c, double s_lo, double s_hi, int k,
                  double t_half)
        : c_(std::move(c)), s_lo_(s_lo), s_hi_(s_hi), k_(k), t_half_(t_half) {}
    int dim() const override { return 1 + k_; }
    void bounds(Vec& lo, Vec& hi) const override {
        lo = Vec::Constant(1 + k_, -t_half_);
        hi = Vec::Constant(1 + k_, t_half_);
        lo[0] = s_lo_;
        hi[0] = s_hi_;
    }
    void fields(const Vec& p, double& z, double& weight, double& H2, double& P2) const override {
        const CurveFactor f = curve_factor(*c_, p[0]);
        z = f.z;
        for (int d = 1; d <= k_; ++d) z += p[d] * p[d];
        weight = 1.0;
        H2 = f.H2;
        P2 = f.H2 * f.H2;
    }

private:
    std::shared_ptr<const ShrinkerCurve> c_;
    double s_lo_, s_hi_;
    int k_;
    double t_half_;
};

class ProductChart final : public FieldsChart {
public:
    ProductChart(std::shared_ptr<const ShrinkerCurve> c1, std::shared_ptr<const ShrinkerCurve> c2,
                 double s1_lo, double s1_hi, double s2_lo, double s2_hi)
        : c1_(std::move(c1)), c2_(std::move(c2)), lo_(2), hi_(2) {
        lo_ << s1_lo, s2_lo;
        hi_ << s1_hi, s2_hi;
    }
    int dim() const override { return 2; }
    void bounds(Vec& lo, Vec& hi) const override {
        lo = lo_;
        hi = hi_;
    }
    void fields(const Vec& p, double& z, double& weight, double& H2, double& P2) const override {
        const CurveFactor f1 = curve_factor(*c1_, p[0]);
        const CurveFactor f2 = curve_factor(*c2_, p[1]);
        z = f1.z + f2.z;
        weight = 1.0;
        H2 = f1.H2 + f2.H2;
        P2 = f1.H2 * f1.H2 + f2.H2 * f2.H2;
    }

private:
    std::shared_ptr<const ShrinkerCurve> c1_, c2_;
    Vec lo_, hi_;
};

// First forward arclength where z crosses the cap, bisected between nodes.
double forward_s_at_z(const ShrinkerCurve& c, double z_cap) {
    const auto ns = c.nodes();
    double prev = 0.0;
    bool found = false;
    double node = c.s_max();
    for (double s : ns) {
        if (s < 0.0) continue;
        if (c.z_of(s) >= z_cap) {
            node = s;
            found = true;
            break;
        }
        prev = s;
    }
    if (!found) return c.s_max();
    double a = prev, b = node;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (a + b);
        (c.z_of(mid) < z_cap ? a : b) = mid;
    }
    return a;
}

double curve_z_min(const ShrinkerCurve& c) {
    double zmin = std::numeric_limits<double>::infinity();
    for (double s : c.nodes()) zmin = std::min(zmin, c.z_of(s));
    return zmin;
}

void require_z_coverage(const ShrinkerCurve& c, double z_needed) {
    const double back = c.z_of(c.s_min());
    if (back < z_needed)
        throw ChartError("intrinsic_chart: traced curve window covers z up to " +
                         std::to_string(back) + " backward, but the requested radius needs " +
                         std::to_string(z_needed));
}

}  // namespace

std::shared_ptr<IntegrationChart> intrinsic_chart(const LiftedShrinker& lift, double r_max,
                                                  double forward_z_cap) {
    const double eps = 1e-9;
    const double z_need = r_max * r_max;
    switch (lift.kind) {
        case LiftedShrinker::Kind::Curve: {
            require_z_coverage(*lift.c1, z_need);
            const double s_hi = std::isfinite(forward_z_cap)
                                    ? forward_s_at_z(*lift.c1, forward_z_cap)
                                    : lift.c1->s_max() - eps;
            return std::make_shared<CurveChart>(lift.c1, lift.c1->s_min() + eps, s_hi);
        }
        case LiftedShrinker::Kind::Cylinder: {
            require_z_coverage(*lift.c1, z_need);
            const double s_hi = std::isfinite(forward_z_cap)
                                    ? forward_s_at_z(*lift.c1, forward_z_cap)
                                    : lift.c1->s_max() - eps;
            const double zmin = curve_z_min(*lift.c1);
            const double t_half = std::sqrt(std::max(1.0, z_need - zmin)) + 0.5;
            return std::make_shared<CylinderChart>(lift.c1, lift.c1->s_min() + eps, s_hi,
                                                   lift.flat_dims, t_half);
        }
        case LiftedShrinker::Kind::Product: {
            const double z2min = curve_z_min(*lift.c2);
            const double z1min = curve_z_min(*lift.c1);
            require_z_coverage(*lift.c1, z_need - z2min);
            require_z_coverage(*lift.c2, z_need - z1min);
            const double s1_hi = std::isfinite(forward_z_cap)
                                     ? forward_s_at_z(*lift.c1, forward_z_cap)
                                     : lift.c1->s_max() - eps;
            const double s2_hi = std::isfinite(forward_z_cap)
                                     ? forward_s_at_z(*lift.c2, forward_z_cap)
                                     : lift.c2->s_max() - eps;
            return std::make_shared<ProductChart>(lift.c1, lift.c2, lift.c1->s_min() + eps, s1_hi,
                                                  lift.c2->s_min() + eps, s2_hi);
        }
    }
    throw InvalidArgument("intrinsic_chart: unknown lift kind");
}

QuadratureResult volume_integral(const IntegrationChart& chart, const RegionSpec& region,
                                 double alpha) {
    return integrate_region(
        chart, -kNoBound, region.r * region.r,
        [alpha](const Vec&, double z) { return std::exp(-alpha * z); }, region.quad);
}

QuadratureResult annulus_integral(const IntegrationChart& chart, double z_lo, double z_hi,
                                  double alpha, const QuadratureOptions& opt) {
    return integrate_region(
        chart, z_lo, z_hi, [alpha](const Vec&, double z) { return std::exp(-alpha * z); }, opt);
}

void GrowthTable::to_csv(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("GrowthTable::to_csv: cannot open " + path);
    std::fprintf(f, "r,V,weighted_V\n");
    for (std::size_t i = 0; i < r.size(); ++i)
        std::fprintf(f, "%.17g,%.17g,%.17g\n", r[i], V[i], weighted_V[i]);
    std::fclose(f);
}

GrowthTable growth_table(const IntegrationChart& chart, const std::vector<double>& r_values,
                         const QuadratureOptions& opt) {
    GrowthTable table;
    for (double r : r_values) {
        RegionSpec region{r, opt};
        table.r.push_back(r);
        table.V.push_back(volume_integral(chart, region, 0.0).value);
        table.weighted_V.push_back(volume_integral(chart, region, 0.25).value);
    }
    return table;
}

double gaussian_functional(const IntegrationChart& chart, const RegionSpec& region, double t) {
    if (!(t > 0.0)) throw InvalidArgument("gaussian_functional: t must be positive");
    const int n = chart.dim();
    const double c = std::pow(4.0 * kPi * t, -0.5 * n);
    QuadratureResult q = integrate_region(
        chart, -kNoBound, region.r * region.r,
        [t](const Vec&, double z) { return std::exp(-z / (4.0 * t)); }, region.quad);
    return c * q.value;
}

double gaussian_functional_dt(const IntegrationChart& chart, const RegionSpec& region, double t,
                              double delta) {
    if (!(t - delta > 0.0)) throw InvalidArgument("gaussian_functional_dt: t - delta must be > 0");
    const int n = chart.dim();
    const double cp = std::pow(4.0 * kPi * (t + delta), -0.5 * n);
    const double cm = std::pow(4.0 * kPi * (t - delta), -0.5 * n);
    QuadratureResult q = integrate_region(
        chart, -kNoBound, region.r * region.r,
        [=](const Vec&, double z) {
            return (cp * std::exp(-z / (4.0 * (t + delta))) -
                    cm * std::exp(-z / (4.0 * (t - delta)))) /
                   (2.0 * delta);
        },
        region.quad);
    return q.value;
}

double gaussian_functional_dr(const IntegrationChart& chart, const RegionSpec& region, double t,
                              double delta_factor) {
    const double dr = delta_factor * region.r;
    RegionSpec plus = region, minus = region;
    plus.r = region.r + dr;
    minus.r = region.r - dr;
    return (gaussian_functional(chart, plus, t) - gaussian_functional(chart, minus, t)) /
           (2.0 * dr);
}

MonotonicityReport monotonicity_check(const IntegrationChart& chart,
                                      const std::vector<double>& r_values,
                                      const std::vector<double>& t_values, double tolerance,
                                      const QuadratureOptions& opt) {
    MonotonicityReport rep;
    rep.t_grid = t_values;
    rep.r_grid = r_values;
    rep.dF = Mat(t_values.size(), r_values.size());
    rep.max_dF = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t_values.size(); ++i)
        for (std::size_t j = 0; j < r_values.size(); ++j) {
            RegionSpec region{r_values[j], opt};
            const double d = gaussian_functional_dt(chart, region, t_values[i]);
            rep.dF(i, j) = d;
            rep.max_dF = std::max(rep.max_dF, d);
        }
    rep.pass = rep.max_dF <= tolerance;
    return rep;
}

DoublingReport doubling_check(const GrowthTable& table, int n) {
    DoublingReport rep;
    // collect doubling pairs (r, r/2) present in the table
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < table.r.size(); ++i)
        for (std::size_t j = 0; j < table.r.size(); ++j)
            if (std::abs(table.r[i] - 2.0 * table.r[j]) < 1e-12 * table.r[i]) pairs.push_back({i, j});
    if (pairs.size() < 4)
        throw InvalidArgument("doubling_check: need at least 4 doubling pairs in the table");

    rep.C1 = 0.0;
    for (auto [i, j] : pairs) {
        const double ratio = table.V[i] / (std::pow(table.r[i], n) * table.V[j]);
        rep.hypothesis_ratio.push_back(ratio);
        rep.C1 = std::max(rep.C1, ratio);
    }

    // anchor C3 at the smallest tabulated radius
    std::size_t i0 = 0;
    for (std::size_t i = 1; i < table.r.size(); ++i)
        if (table.r[i] < table.r[i0]) i0 = i;
    const double lr0 = std::log(table.r[i0]);
    rep.C3 = table.V[i0] / std::exp(2.0 * n * lr0 * lr0);
    rep.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < table.r.size(); ++i) {
        if (i == i0) continue;
        const double lr = std::log(table.r[i]);
        const double margin = std::log(rep.C3) + 2.0 * n * lr * lr - std::log(table.V[i]);
        rep.bound_margin.push_back(margin);
        rep.min_margin = std::min(rep.min_margin, margin);
    }
    rep.pass = std::isfinite(rep.C1) && rep.C1 > 0.0 && rep.min_margin >= 0.0;
    return rep;
}

CauchyReport weighted_cauchy_check(const IntegrationChart& chart, double alpha,
                                   const std::vector<double>& r_values,
                                   const QuadratureOptions& opt) {
    CauchyReport rep;
    rep.alpha = alpha;
    for (double r : r_values)
        rep.increments.push_back(annulus_integral(chart, r * r, 4.0 * r * r, alpha, opt).value);
    rep.worst_ratio = 0.0;
    for (std::size_t k = 0; k + 1 < rep.increments.size(); ++k) {
        if (rep.increments[k] <= 0.0) continue;
        rep.worst_ratio = std::max(rep.worst_ratio, rep.increments[k + 1] / rep.increments[k]);
    }
    rep.pass = rep.worst_ratio < 1.0;
    return rep;
}

double bakry_emery_check(const SpacelikeGraph& graph, const Vec& x, double residual_gate) {
    const double res = std::sqrt(shrinker_residual2(graph, x));
    if (res >= residual_gate)
        throw NotAShrinkerError("bakry_emery_check: point violates the shrinker equation (residual " +
                                    std::to_string(res) + ")",
                                res);
    DerivedTensors dt = derived_tensors(graph, x);
    const PointGeometry& pg = dt.pg;
    const int n = graph.sig().n, m = graph.sig().m;

    Mat ric = dt.P;  // <H, B_ij>
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int a = 0; a < m; ++a) ric(i, j) += pg.h[a](i, k) * pg.h[a](j, k);

    const Mat ric_f = ric + 0.25 * hess_z_frame(pg) - 0.5 * Mat::Identity(n, n);
    Eigen::SelfAdjointEigenSolver<Mat> es(ric_f);
    return es.eigenvalues().minCoeff();
}

namespace {

// The cutoff behind the constant C: 1 on [0,1), 0 on [2,inf), cubic bridge
// phi(x) = 1 - (3u^2 - 2u^3) with u = x - 1, so |phi'| peaks at C = 1.5.
ProbeReport run_probe(const FieldsChart& chart, const std::vector<double>& r_values,
                      const std::function<double(double)>& h2_scale,
                      const QuadratureOptions& opt) {
    const double C = 1.5;
    auto scale = [&h2_scale](double z) { return h2_scale ? h2_scale(z) : 1.0; };

    ProbeReport rep;
    rep.cutoff_constant = C;
    for (double r : r_values) {
        ProbeRow row;
        row.r = r;
        QuadratureResult lhs = integrate_region(
            chart, -kNoBound, r * r,
            [&](const Vec& p, double z) {
                double zz, w, H2, P2;
                chart.fields(p, zz, w, H2, P2);
                const double s = scale(z);
                return (0.5 * H2 * s + P2 * s * s) * std::exp(-z / 4.0);
            },
            opt);
        QuadratureResult rhs = integrate_region(
            chart, r * r, 4.0 * r * r,
            [&](const Vec& p, double z) {
                double zz, w, H2, P2;
                chart.fields(p, zz, w, H2, P2);
                const double h2 = H2 * scale(z);
                return h2 * (1.0 + 4.0 * h2 / z) * std::exp(-z / 4.0);
            },
            opt);
        row.lhs = lhs.value;
        row.rhs = (C * C) / (r * r) * rhs.value;
        rep.rows.push_back(row);
    }
    rep.rhs_decreasing = true;
    for (std::size_t k = 0; k + 1 < rep.rows.size(); ++k)
        if (!(rep.rows[k + 1].rhs < rep.rows[k].rhs)) rep.rhs_decreasing = false;

    // measured growth exponent sup ln|H|^2 / z over a lattice with z >= 1
    Vec lo, hi;
    chart.bounds(lo, hi);
    const int per_axis = (chart.dim() == 1) ? 4096 : 96;
    double alpha = -std::numeric_limits<double>::infinity();
    std::vector<int> idx(chart.dim(), 0);
    Vec p(chart.dim());
    while (true) {
        for (int d = 0; d < chart.dim(); ++d)
            p[d] = lo[d] + (idx[d] + 0.5) / per_axis * (hi[d] - lo[d]);
        double z, w, H2, P2;
        chart.fields(p, z, w, H2, P2);
        const double h2 = H2 * scale(z);
        if (z >= 1.0 && h2 > 0.0) alpha = std::max(alpha, std::log(h2) / z);
        int d = 0;
        for (; d < chart.dim(); ++d) {
            if (++idx[d] < per_axis) break;
            idx[d] = 0;
        }
        if (d == chart.dim()) break;
    }
    rep.measured_alpha = alpha;
    return rep;
}

// FieldsChart adapter over a graph window for the probe.
class GraphFieldsChart final : public FieldsChart {
public:
    GraphFieldsChart(std::shared_ptr<const SpacelikeGraph> graph, Vec lo, Vec hi)
        : graph_(std::move(graph)), lo_(std::move(lo)), hi_(std::move(hi)) {}
    int dim() const override { return static_cast<int>(lo_.size()); }
    void bounds(Vec& lo, Vec& hi) const override {
        lo = lo_;
        hi = hi_;
    }
    void fields(const Vec& p, double& z, double& weight, double& H2, double& P2) const override {
        DerivedTensors dt = derived_tensors(*graph_, p);
        z = dt.pg.z;
        weight = dt.pg.sqrt_det_g;
        H2 = dt.normH2;
        P2 = dt.normP2;
    }

private:
    std::shared_ptr<const SpacelikeGraph> graph_;
    Vec lo_, hi_;
};

}  // namespace

ProbeReport theorem_probe_H(const LiftedShrinker& lift, const std::vector<double>& r_values,
                            std::optional<double> alpha,
                            const std::function<double(double)>& h2_scale,
                            const QuadratureOptions& opt) {
    double r_max = 0.0;
    for (double r : r_values) r_max = std::max(r_max, 2.0 * r);
    // keep the forward branch inside the growth-hypothesis window; the
    // backward branch decays and dominates the large-z annuli
    const double forward_cap = alpha ? std::max(6.0, 1.0 / *alpha) : 9.0;
    auto chart = intrinsic_chart(lift, r_max, forward_cap);
    const auto* fc = dynamic_cast<const FieldsChart*>(chart.get());
    if (!fc) throw InvalidArgument("theorem_probe_H: chart does not carry probe fields");
    return run_probe(*fc, r_values, h2_scale, opt);
}

ProbeReport theorem_probe_H_graph(std::shared_ptr<const SpacelikeGraph> graph, const Vec& lo,
                                  const Vec& hi, const std::vector<double>& r_values,
                                  const std::function<double(double)>& h2_scale,
                                  const QuadratureOptions& opt) {
    GraphFieldsChart chart(std::move(graph), lo, hi);
    return run_probe(chart, r_values, h2_scale, opt);
}

}  // namespace spacelike
