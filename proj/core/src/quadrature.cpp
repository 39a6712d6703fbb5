#include "spacelike/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace spacelike {

namespace {

// 5-point and embedded 3-point Gauss-Legendre nodes/weights on [-1,1].
constexpr double g5x[5] = {-0.906179845938663992797626878299, -0.538469310105683091036314420700, 0.0,
                           0.538469310105683091036314420700, 0.906179845938663992797626878299};
constexpr double g5w[5] = {0.236926885056189087514264040720, 0.478628670499366468041291514836,
                           0.568888888888888888888888888889, 0.478628670499366468041291514836,
                           0.236926885056189087514264040720};
constexpr double g3x[3] = {-0.774596669241483377035853079956, 0.0,
                           0.774596669241483377035853079956};
constexpr double g3w[3] = {0.555555555555555555555555555556, 0.888888888888888888888888888889,
                           0.555555555555555555555555555556};

struct Cell {
    Vec lo, hi;
    double value = 0.0;
    double unc = 0.0;
    int depth = 0;
    bool boundary = false;
    long id = 0;  // insertion index, for deterministic heap order
};

struct CellOrder {
    bool operator()(const Cell& a, const Cell& b) const {
        if (a.unc != b.unc) return a.unc < b.unc;  // max-heap on uncertainty
        return a.id < b.id;
    }
};

class RegionIntegrator {
public:
    RegionIntegrator(const IntegrationChart& chart, double z_lo, double z_hi,
                     const std::function<double(const Vec&, double)>& f,
                     const QuadratureOptions& opt)
        : chart_(chart), z_lo_(z_lo), z_hi_(z_hi), f_(f), opt_(opt), dim_(chart.dim()) {}

    QuadratureResult run() {
        Vec lo, hi;
        chart_.bounds(lo, hi);
        const int base = std::max(1, opt_.base_cells_per_axis);
        std::vector<int> idx(dim_, 0);

        // top-level uniform grid
        while (true) {
            Cell c;
            c.lo = Vec(dim_);
            c.hi = Vec(dim_);
            for (int d = 0; d < dim_; ++d) {
                const double w = (hi[d] - lo[d]) / base;
                c.lo[d] = lo[d] + idx[d] * w;
                c.hi[d] = c.lo[d] + w;
            }
            evaluate(c);
            push(c);
            int d = 0;
            for (; d < dim_; ++d) {
                if (++idx[d] < base) break;
                idx[d] = 0;
            }
            if (d == dim_) break;
        }

        // worst-first refinement
        while (total_cells_ < opt_.max_cells) {
            const double tol =
                std::max(opt_.abs_tol, opt_.rel_tol * std::abs(total_value_)) + 1e-300;
            if (total_unc_ <= tol) break;
            if (heap_.empty()) break;
            Cell worst = heap_.top();
            if (worst.unc <= 0.0) break;
            heap_.pop();
            total_value_ -= worst.value;
            total_unc_ -= worst.unc;
            if (worst.depth >= opt_.max_depth) {
                frozen_value_ += worst.value;
                frozen_unc_ += worst.unc;
                continue;
            }
            subdivide(worst);
        }

        QuadratureResult out;
        out.value = total_value_ + frozen_value_;
        out.uncertainty = total_unc_ + frozen_unc_;
        out.cells = total_cells_;
        const double tol = std::max(opt_.abs_tol, opt_.rel_tol * std::abs(out.value)) + 1e-300;
        out.converged = out.uncertainty <= tol;
        return out;
    }

private:
    void push(Cell c) {
        c.id = next_id_++;
        total_value_ += c.value;
        total_unc_ += c.unc;
        ++total_cells_;
        if (c.unc > 0.0) heap_.push(std::move(c));
    }

    void subdivide(const Cell& c) {
        const int parts = 1 << dim_;
        for (int mask = 0; mask < parts; ++mask) {
            Cell child;
            child.lo = Vec(dim_);
            child.hi = Vec(dim_);
            for (int d = 0; d < dim_; ++d) {
                const double mid = 0.5 * (c.lo[d] + c.hi[d]);
                if (mask & (1 << d)) {
                    child.lo[d] = mid;
                    child.hi[d] = c.hi[d];
                } else {
                    child.lo[d] = c.lo[d];
                    child.hi[d] = mid;
                }
            }
            child.depth = c.depth + 1;
            evaluate(child);
            push(child);
        }
    }

    double gauss(const Cell& c, const double* gx, const double* gw, int np) const {
        // tensor rule over the cell, integrand restricted by the indicator
        std::vector<int> idx(dim_, 0);
        double sum = 0.0;
        Vec p(dim_);
        while (true) {
            double wt = 1.0;
            for (int d = 0; d < dim_; ++d) {
                const double half = 0.5 * (c.hi[d] - c.lo[d]);
                p[d] = 0.5 * (c.lo[d] + c.hi[d]) + half * gx[idx[d]];
                wt *= half * gw[idx[d]];
            }
            double z, dens;
            chart_.eval(p, z, dens);
            if (z >= z_lo_ && z < z_hi_) sum += wt * f_(p, z) * dens;
            int d = 0;
            for (; d < dim_; ++d) {
                if (++idx[d] < np) break;
                idx[d] = 0;
            }
            if (d == dim_) break;
        }
        return sum;
    }

    void evaluate(Cell& c) {
        // classify against the z-slab with corner + Gauss-node samples
        double zmin = std::numeric_limits<double>::infinity();
        double zmax = -zmin;
        double max_abs_fw = 0.0;
        double volume = 1.0;
        for (int d = 0; d < dim_; ++d) volume *= (c.hi[d] - c.lo[d]);

        std::vector<int> idx(dim_, 0);
        Vec p(dim_);
        const int np = 3;
        while (true) {
            for (int d = 0; d < dim_; ++d) {
                // corners and interior probe nodes
                const double t = (np == 1) ? 0.5 : idx[d] / double(np - 1);
                p[d] = c.lo[d] + t * (c.hi[d] - c.lo[d]);
            }
            double z, dens;
            chart_.eval(p, z, dens);
            zmin = std::min(zmin, z);
            zmax = std::max(zmax, z);
            max_abs_fw = std::max(max_abs_fw, std::abs(f_(p, z) * dens));
            int d = 0;
            for (; d < dim_; ++d) {
                if (++idx[d] < np) break;
                idx[d] = 0;
            }
            if (d == dim_) break;
        }

        const double spread = zmax - zmin;
        const double margin = 0.6 * spread + 1e-12 * (1.0 + std::abs(zmax));
        const bool outside = (zmin - margin >= z_hi_) || (zmax + margin < z_lo_);
        const bool inside = (zmin - margin >= z_lo_ || z_lo_ == -kNoBound) &&
                            (zmax + margin < z_hi_ || z_hi_ == kNoBound);

        if (outside) {
            c.value = 0.0;
            c.unc = 0.0;
            c.boundary = false;
            return;
        }
        if (inside) {
            const double coarse = gauss(c, g3x, g3w, 3);
            const double fine = gauss(c, g5x, g5w, 5);
            c.value = fine;
            c.unc = std::abs(fine - coarse);
            c.boundary = false;
            return;
        }
        // straddles the region boundary: estimate by the sampled inside
        // fraction, charge the full cell as uncertainty
        c.boundary = true;
        c.value = gauss(c, g5x, g5w, 5);
        c.unc = volume * max_abs_fw;
        if (c.unc == 0.0) c.unc = volume * 1e-300;
    }

    const IntegrationChart& chart_;
    double z_lo_, z_hi_;
    const std::function<double(const Vec&, double)>& f_;
    QuadratureOptions opt_;
    int dim_;

    std::priority_queue<Cell, std::vector<Cell>, CellOrder> heap_;
    double total_value_ = 0.0, total_unc_ = 0.0;
    double frozen_value_ = 0.0, frozen_unc_ = 0.0;
    long total_cells_ = 0, next_id_ = 0;
};

}  // namespace

QuadratureResult integrate_region(const IntegrationChart& chart, double z_lo, double z_hi,
                                  const std::function<double(const Vec&, double)>& f,
                                  const QuadratureOptions& opt) {
    RegionIntegrator ri(chart, z_lo, z_hi, f, opt);
    return ri.run();
}

GraphChart::GraphChart(std::shared_ptr<const SpacelikeGraph> graph, Vec lo, Vec hi)
    : graph_(std::move(graph)), lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.size() != hi_.size() || static_cast<int>(lo_.size()) != graph_->sig().n)
        throw InvalidArgument("GraphChart: bounds must match the graph dimension");
}

void GraphChart::eval(const Vec& param, double& z, double& weight) const {
    ChartPoint cp = chart_point(*graph_, param);
    z = cp.z;
    weight = cp.sqrt_det_g;
}

}  // namespace spacelike
