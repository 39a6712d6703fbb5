#include "spacelike/shrinker.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace spacelike {

namespace {

void shrinker_rhs(double /*s*/, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    const double c = std::cosh(y[2]), sh = std::sinh(y[2]);
    dy[0] = c;
    dy[1] = sh;
    dy[2] = 0.5 * (y[0] * sh - y[1] * c);
}

double z_of_state(const Eigen::VectorXd& y) { return y[0] * y[0] - y[1] * y[1]; }

}  // namespace

ShrinkerCurve::State ShrinkerCurve::at(double s) const {
    const Eigen::Vector3d v = y(s);
    return {s, v[0], v[1], v[2]};
}

Eigen::Vector3d ShrinkerCurve::y(double s) const {
    if (s == 0.0 || (!fwd_ && !bwd_)) return y0_;
    if (s > 0.0) {
        if (!fwd_) throw ChartError("ShrinkerCurve: no forward branch");
        return fwd_->eval(s);
    }
    if (!bwd_) throw ChartError("ShrinkerCurve: no backward branch");
    return bwd_->eval(s);
}

Eigen::Vector3d ShrinkerCurve::dy(double s) const {
    const auto& sol = (s >= 0.0) ? fwd_ : bwd_;
    if (!sol) {
        // derivative at the seam when only one branch exists
        const auto& other = (s >= 0.0) ? bwd_ : fwd_;
        if (!other) throw ChartError("ShrinkerCurve: empty curve");
        return other->eval_derivative(s);
    }
    return sol->eval_derivative(s);
}

Eigen::Vector3d ShrinkerCurve::ddy(double s) const {
    const auto& sol = (s >= 0.0) ? fwd_ : bwd_;
    if (!sol) {
        const auto& other = (s >= 0.0) ? bwd_ : fwd_;
        if (!other) throw ChartError("ShrinkerCurve: empty curve");
        return other->eval_second_derivative(s);
    }
    return sol->eval_second_derivative(s);
}

double ShrinkerCurve::z_of(double s) const {
    const Eigen::Vector3d v = y(s);
    return v[0] * v[0] - v[1] * v[1];
}

double ShrinkerCurve::u_of(double s) const {
    const Eigen::Vector3d v = y(s);
    return v[0] * std::cosh(v[2]) - v[1] * std::sinh(v[2]);
}

double ShrinkerCurve::v_of(double s) const {
    const Eigen::Vector3d v = y(s);
    return v[0] * std::sinh(v[2]) - v[1] * std::cosh(v[2]);
}

double ShrinkerCurve::residual2(double s) const {
    // Geometry of the traced polynomial curve c(s) = (gamma1, gamma2):
    // no shrinker structure is assumed here.
    const Eigen::Vector3d p = y(s), dp = dy(s), ddp = ddy(s);
    const double cx = dp[0], cy = dp[1];
    const double w2 = cx * cx - cy * cy;  // <c',c'>, ~1
    if (w2 <= 0.0) return std::numeric_limits<double>::infinity();
    const double w = std::sqrt(w2);
    // unit tangent T = c'/w; T' = c''/w - c' (w'/w^2) with w' = <c',c''>/w
    const double wp = (cx * ddp[0] - cy * ddp[1]) / w;
    const double Tx = cx / w, Ty = cy / w;
    const double dTx = ddp[0] / w - cx * wp / w2;
    const double dTy = ddp[1] / w - cy * wp / w2;
    // curvature vector H = T'/w (normal automatically); unit normal (Ty, Tx)
    const double Hx = dTx / w, Hy = dTy / w;
    const double nux = Ty, nuy = Tx;  // <nu,nu> = -1
    const double Fnu = p[0] * nux - p[1] * nuy;
    // F^N = -<F,nu> nu; residual R = H + F^N/2
    const double Rx = Hx - 0.5 * Fnu * nux;
    const double Ry = Hy - 0.5 * Fnu * nuy;
    const double q = -(Rx * Rx - Ry * Ry);
    return q > 0.0 ? q : 0.0;
}

double ShrinkerCurve::sup_residual2_at_nodes() const {
    double sup = 0.0;
    for (double s : nodes()) {
        // skip the extreme ends where the dense window has no two-sided support
        sup = std::max(sup, residual2(s));
    }
    return sup;
}

std::vector<double> ShrinkerCurve::nodes() const {
    std::vector<double> out;
    if (bwd_)
        for (auto it = bwd_->nodes().rbegin(); it != bwd_->nodes().rend(); ++it)
            out.push_back(*it);
    else
        out.push_back(0.0);
    if (fwd_) {
        for (std::size_t i = 1; i < fwd_->nodes().size(); ++i) out.push_back(fwd_->nodes()[i]);
    }
    return out;
}

double ShrinkerCurve::arclength_of_x(double x) const {
    // gamma1 is strictly increasing in s; bisect then polish with Newton.
    double lo = s_min_, hi = s_max_;
    const double x_lo = y(lo)[0], x_hi = y(hi)[0];
    if (x < x_lo - 1e-9 || x > x_hi + 1e-9)
        throw ChartError("ShrinkerCurve: x outside the traced gamma1 range");
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (y(mid)[0] < x)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-3) break;
    }
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 60; ++it) {
        const Eigen::Vector3d v = y(s);
        const double fx = v[0] - x;
        const double slope = std::cosh(v[2]);
        double step = fx / slope;
        s -= step;
        s = std::min(std::max(s, s_min_), s_max_);
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(s))) break;
    }
    return s;
}

ShrinkerCurve::Window ShrinkerCurve::graphical_window(double tanh_bound) const {
    const double phi_bound = std::atanh(tanh_bound);
    if (std::abs(y0_[2]) >= phi_bound)
        throw ChartError("ShrinkerCurve: start point is outside the graphical slope bound");
    auto ok = [&](double s) { return std::abs(y(s)[2]) < phi_bound; };
    double lo = s_min_, hi = s_max_;
    if (!ok(lo)) {
        double a = lo, b = 0.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            (ok(mid) ? b : a) = mid;
        }
        lo = b;
    }
    if (!ok(hi)) {
        double a = 0.0, b = hi;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            (ok(mid) ? a : b) = mid;
        }
        hi = a;
    }
    Window w;
    w.s_lo = lo;
    w.s_hi = hi;
    w.x_lo = y(lo)[0];
    w.x_hi = y(hi)[0];
    return w;
}

void ShrinkerCurve::to_csv(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("ShrinkerCurve::to_csv: cannot open " + path);
    std::fprintf(f, "s,gamma1,gamma2,phi,residual2\n");
    for (double s : nodes()) {
        const Eigen::Vector3d v = y(s);
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", s, v[0], v[1], v[2], residual2(s));
    }
    std::fclose(f);
}

ShrinkerCurve integrate_shrinker_curve(double gamma1_0, double gamma2_0, double phi0, double s_lo,
                                       double s_hi, double tol,
                                       std::optional<double> z_stop_backward,
                                       std::optional<double> z_stop_forward) {
    if (!(tol >= 1e-13 && tol <= 1e-6))
        throw InvalidArgument("integrate_shrinker_curve: tol must lie in [1e-13, 1e-6]");
    if (!(s_lo <= 0.0 && s_hi >= 0.0))
        throw InvalidArgument("integrate_shrinker_curve: s range must contain 0");
    if (!std::isfinite(s_lo) || !std::isfinite(s_hi))
        throw InvalidArgument("integrate_shrinker_curve: s range must be finite");

    ShrinkerCurve curve;
    curve.tol_ = tol;
    curve.y0_ = Eigen::Vector3d(gamma1_0, gamma2_0, phi0);

    Dop853::Options opt;
    opt.atol = tol;
    opt.rtol = tol;

    Dop853::StopFn stop_fwd = nullptr, stop_bwd = nullptr;
    if (z_stop_forward)
        stop_fwd = [zc = *z_stop_forward](double, const Eigen::VectorXd& y) {
            return z_of_state(y) >= zc;
        };
    if (z_stop_backward)
        stop_bwd = [zc = *z_stop_backward](double, const Eigen::VectorXd& y) {
            return z_of_state(y) >= zc;
        };

    if (s_hi > 0.0) {
        curve.fwd_ = Dop853::integrate(shrinker_rhs, 0.0, curve.y0_, s_hi, opt, stop_fwd);
        curve.s_max_ = curve.fwd_->t_end();
    }
    if (s_lo < 0.0) {
        curve.bwd_ = Dop853::integrate(shrinker_rhs, 0.0, curve.y0_, s_lo, opt, stop_bwd);
        curve.s_min_ = curve.bwd_->t_end();
    }
    return curve;
}

namespace {

struct CurveFns {
    double f, f1, f2, f3, f4;
};

// Closed-form jets of the graph gamma2 = f(gamma1) through the reduction:
// with u = <F,T>, v = <F,nu>, the chain phi' = v/2, phi'' = uv/4,
// phi''' = v(1 + v^2/2 + u^2/2)/4 turns arclength derivatives into
// x-derivatives via d/dx = (1/cosh phi) d/ds.
CurveFns shrinker_exact_jets(const Eigen::Vector3d& y) {
    const double g1 = y[0], g2 = y[1], phi = y[2];
    const double c = std::cosh(phi), sh = std::sinh(phi);
    const double u = g1 * c - g2 * sh;
    const double v = g1 * sh - g2 * c;
    const double p1 = 0.5 * v;
    const double p2 = 0.25 * u * v;
    const double p3 = 0.25 * v * (1.0 + 0.5 * v * v + 0.5 * u * u);
    const double c2 = c * c, c3 = c2 * c, c4 = c3 * c, c5 = c4 * c, c6 = c5 * c, c7 = c6 * c;
    CurveFns out;
    out.f = g2;
    out.f1 = sh / c;
    out.f2 = p1 / c3;
    out.f3 = p2 / c4 - 3.0 * p1 * p1 * sh / c5;
    out.f4 = p3 / c5 - 10.0 * p1 * p2 * sh / c6 - 3.0 * p1 * p1 * p1 / c5 +
             15.0 * p1 * p1 * p1 * sh * sh / c7;
    return out;
}

class CurveProvider final : public JetProvider {
public:
    CurveProvider(std::shared_ptr<const ShrinkerCurve> curve, CurveJets flavor)
        : curve_(std::move(curve)), flavor_(flavor) {}

    int domain_dim() const override { return 1; }
    int range_dim() const override { return 1; }
    int max_order() const override { return 4; }

    MapJet jets(const Vec& x, int order) const override {
        const double s = curve_->arclength_of_x(x[0]);
        const Eigen::Vector3d y = curve_->y(s);
        CurveFns fn = shrinker_exact_jets(y);
        if (flavor_ == CurveJets::Trajectory) {
            // orders 0..2 from the dense polynomial of the traced curve
            const Eigen::Vector3d dp = curve_->dy(s);
            const Eigen::Vector3d ddp = curve_->ddy(s);
            fn.f = y[1];
            fn.f1 = dp[1] / dp[0];
            fn.f2 = (ddp[1] * dp[0] - dp[1] * ddp[0]) / (dp[0] * dp[0] * dp[0]);
        }
        MapJet jet(1, 1, order);
        jet.f(0) = fn.f;
        if (order >= 1) jet.d1(0, 0) = fn.f1;
        if (order >= 2) jet.d2(0, 0, 0) = fn.f2;
        if (order >= 3) jet.d3(0, 0, 0, 0) = fn.f3;
        if (order >= 4) jet.d4(0, 0, 0, 0, 0) = fn.f4;
        return jet;
    }

private:
    std::shared_ptr<const ShrinkerCurve> curve_;
    CurveJets flavor_;
};

// Lifts: the curve block rides on axis 0 (and axis 1 for the second
// product factor); flat cylinder axes contribute nothing.
class CylinderProvider final : public JetProvider {
public:
    CylinderProvider(std::shared_ptr<const ShrinkerCurve> curve, int k, CurveJets flavor)
        : base_(std::make_shared<CurveProvider>(std::move(curve), flavor)), k_(k) {}

    int domain_dim() const override { return 1 + k_; }
    int range_dim() const override { return 1; }
    int max_order() const override { return 4; }

    MapJet jets(const Vec& x, int order) const override {
        Vec x0(1);
        x0[0] = x[0];
        MapJet b = base_->jets(x0, order);
        MapJet jet(1 + k_, 1, order);
        jet.f(0) = b.f(0);
        if (order >= 1) jet.d1(0, 0) = b.d1(0, 0);
        if (order >= 2) jet.d2(0, 0, 0) = b.d2(0, 0, 0);
        if (order >= 3) jet.d3(0, 0, 0, 0) = b.d3(0, 0, 0, 0);
        if (order >= 4) jet.d4(0, 0, 0, 0, 0) = b.d4(0, 0, 0, 0, 0);
        return jet;
    }

private:
    std::shared_ptr<CurveProvider> base_;
    int k_;
};

class ProductProvider final : public JetProvider {
public:
    ProductProvider(std::shared_ptr<const ShrinkerCurve> c1,
                    std::shared_ptr<const ShrinkerCurve> c2, CurveJets flavor)
        : b1_(std::make_shared<CurveProvider>(std::move(c1), flavor)),
          b2_(std::make_shared<CurveProvider>(std::move(c2), flavor)) {}

    int domain_dim() const override { return 2; }
    int range_dim() const override { return 2; }
    int max_order() const override { return 4; }

    MapJet jets(const Vec& x, int order) const override {
        MapJet jet(2, 2, order);
        for (int blk = 0; blk < 2; ++blk) {
            Vec x0(1);
            x0[0] = x[blk];
            MapJet b = (blk == 0 ? b1_ : b2_)->jets(x0, order);
            jet.f(blk) = b.f(0);
            if (order >= 1) jet.d1(blk, blk) = b.d1(0, 0);
            if (order >= 2) jet.d2(blk, blk, blk) = b.d2(0, 0, 0);
            if (order >= 3) jet.d3(blk, blk, blk, blk) = b.d3(0, 0, 0, 0);
            if (order >= 4) jet.d4(blk, blk, blk, blk, blk) = b.d4(0, 0, 0, 0, 0);
        }
        return jet;
    }

private:
    std::shared_ptr<CurveProvider> b1_, b2_;
};

constexpr double kFlatBox = 1e6;

}  // namespace

std::shared_ptr<const JetProvider> curve_jet_provider(std::shared_ptr<const ShrinkerCurve> curve,
                                                      CurveJets flavor) {
    return std::make_shared<CurveProvider>(std::move(curve), flavor);
}

LiftedShrinker curve_graph(std::shared_ptr<const ShrinkerCurve> curve) {
    LiftedShrinker lift;
    lift.kind = LiftedShrinker::Kind::Curve;
    lift.c1 = curve;
    const auto w = curve->graphical_window();
    lift.x_lo = Vec::Constant(1, w.x_lo);
    lift.x_hi = Vec::Constant(1, w.x_hi);
    lift.base_residual2 = curve->sup_residual2_at_nodes();
    Signature sig(1, 1);
    lift.graph = std::make_shared<SpacelikeGraph>(
        sig, curve_jet_provider(curve, CurveJets::ShrinkerExact));
    lift.trajectory_graph = std::make_shared<SpacelikeGraph>(
        sig, curve_jet_provider(curve, CurveJets::Trajectory));
    return lift;
}

LiftedShrinker cylinder_lift(std::shared_ptr<const ShrinkerCurve> curve, int k) {
    if (k < 1) throw InvalidArgument("cylinder_lift: k must be >= 1");
    LiftedShrinker lift;
    lift.kind = LiftedShrinker::Kind::Cylinder;
    lift.flat_dims = k;
    lift.c1 = curve;
    const auto w = curve->graphical_window();
    lift.x_lo = Vec::Constant(1 + k, -kFlatBox);
    lift.x_hi = Vec::Constant(1 + k, kFlatBox);
    lift.x_lo[0] = w.x_lo;
    lift.x_hi[0] = w.x_hi;
    lift.base_residual2 = curve->sup_residual2_at_nodes();
    Signature sig(1 + k, 1);
    lift.graph = std::make_shared<SpacelikeGraph>(
        sig, std::make_shared<CylinderProvider>(curve, k, CurveJets::ShrinkerExact));
    lift.trajectory_graph = std::make_shared<SpacelikeGraph>(
        sig, std::make_shared<CylinderProvider>(curve, k, CurveJets::Trajectory));
    return lift;
}

LiftedShrinker product_shrinker(std::shared_ptr<const ShrinkerCurve> c1,
                                std::shared_ptr<const ShrinkerCurve> c2) {
    LiftedShrinker lift;
    lift.kind = LiftedShrinker::Kind::Product;
    lift.c1 = c1;
    lift.c2 = c2;
    const auto w1 = c1->graphical_window();
    const auto w2 = c2->graphical_window();
    lift.x_lo = Vec(2);
    lift.x_hi = Vec(2);
    lift.x_lo << w1.x_lo, w2.x_lo;
    lift.x_hi << w1.x_hi, w2.x_hi;
    lift.base_residual2 =
        std::max(c1->sup_residual2_at_nodes(), c2->sup_residual2_at_nodes());
    Signature sig(2, 2);
    lift.graph = std::make_shared<SpacelikeGraph>(
        sig, std::make_shared<ProductProvider>(c1, c2, CurveJets::ShrinkerExact));
    lift.trajectory_graph = std::make_shared<SpacelikeGraph>(
        sig, std::make_shared<ProductProvider>(c1, c2, CurveJets::Trajectory));
    return lift;
}

std::vector<Vec> sample_points(const LiftedShrinker& lift, int count, std::uint64_t seed,
                               double flat_range, double curve_margin) {
    std::mt19937_64 rng(seed);
    auto unit = [&rng]() {
        return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // portable uniform in [0,1)
    };
    const int n = static_cast<int>(lift.x_lo.size());
    std::vector<Vec> out;
    out.reserve(count);
    for (int c = 0; c < count; ++c) {
        Vec x(n);
        for (int i = 0; i < n; ++i) {
            double lo = lift.x_lo[i], hi = lift.x_hi[i];
            if (lo <= -kFlatBox) {
                lo = -flat_range;
                hi = flat_range;
            } else {
                const double pad = curve_margin * (hi - lo);
                lo += pad;
                hi -= pad;
            }
            x[i] = lo + (hi - lo) * unit();
        }
        out.push_back(x);
    }
    return out;
}

Suite build_standard_suite(const SuiteConfig& cfg, int n_limit, int m_limit) {
    // generous s bounds; the z caps terminate both directions first
    auto curve = std::make_shared<ShrinkerCurve>(integrate_shrinker_curve(
        cfg.gamma1_0, cfg.gamma2_0, cfg.phi0, -200.0, 50.0, cfg.ode_tol, cfg.z_backward,
        cfg.z_forward));
    Suite suite;
    auto want = [&](int n, int m) {
        if (n_limit > 0 && n != n_limit) return false;
        if (m_limit > 0 && m != m_limit) return false;
        return true;
    };
    if (want(1, 1)) {
        suite.names.push_back("curve");
        suite.members.push_back(curve_graph(curve));
    }
    if (want(2, 1)) {
        suite.names.push_back("cylinder");
        suite.members.push_back(cylinder_lift(curve, 1));
    }
    if (want(2, 2)) {
        suite.names.push_back("product");
        suite.members.push_back(product_shrinker(curve, curve));
    }
    return suite;
}

}  // namespace spacelike
