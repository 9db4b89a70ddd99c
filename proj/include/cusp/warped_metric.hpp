#pragma once

#include "cusp/bump.hpp"
#include "cusp/errors.hpp"
#include "cusp/volume_profile.hpp"
#include "cusp/warp_profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace cusp {

/// Cusp metric ds^2 + sum_j exp(-2 w_j(s)) (dx^j)^2 on [s0, inf) x T^m.
///
/// Fiber indices are 1-based (x^1 .. x^m) throughout the public API.
/// fiber_volumes are the circumferences of the torus factors before warping,
/// so the j-th factor has length fiber_volumes[j-1] * exp(-w_j(s)).
class TorusCuspMetric {
public:
    TorusCuspMetric(std::vector<WarpProfile> warps, std::vector<double> fiber_volumes)
        : warps_(std::move(warps)), fiber_volumes_(std::move(fiber_volumes)) {
        if (warps_.empty())
            throw DomainError("cusp metric needs at least one fiber direction");
        if (warps_.size() != fiber_volumes_.size())
            throw DomainError("one fiber volume per warp is required");
        for (const auto& w : warps_)
            if (w.s0() != warps_.front().s0())
                throw DomainError("all warps must share the same s0");
        for (double vol : fiber_volumes_)
            if (!(vol > 0.0) || !std::isfinite(vol))
                throw DomainError("fiber volumes must be positive");
    }

    /// Constant curvature -1 cusp of dimension n (all w_j = s, unit fibers).
    static TorusCuspMetric hyperbolic(int n, double s0 = 0.0) {
        if (n < 2)
            throw DomainError("cusp dimension must be at least 2");
        std::vector<WarpProfile> warps(static_cast<std::size_t>(n - 1),
                                       WarpProfile::affine(s0, 1.0));
        return TorusCuspMetric(std::move(warps), std::vector<double>(warps.size(), 1.0));
    }

    [[nodiscard]] int fiber_dim() const noexcept { return static_cast<int>(warps_.size()); }
    [[nodiscard]] int dimension() const noexcept { return fiber_dim() + 1; }
    [[nodiscard]] double s0() const noexcept { return warps_.front().s0(); }
    [[nodiscard]] const std::vector<WarpProfile>& warps() const noexcept { return warps_; }
    [[nodiscard]] const std::vector<double>& fiber_volumes() const noexcept {
        return fiber_volumes_;
    }

    [[nodiscard]] const WarpProfile& warp(int j) const {
        check_index(j);
        return warps_[static_cast<std::size_t>(j - 1)];
    }

    /// h_jj(s)
    [[nodiscard]] double fiber_metric(int j, double s) const {
        return std::exp(-2.0 * warp(j).eval(s));
    }

    /// S_jj(s) = w_j'(s) h_jj(s), from d/ds h = -2 S.
    [[nodiscard]] double second_fundamental_form(int j, double s) const {
        return warp(j).deriv1(s) * fiber_metric(j, s);
    }

    /// Combined tail of the warps.  Periodic warps must share one period.
    [[nodiscard]] TailDeclaration tail() const {
        TailDeclaration out{TailDeclaration::Kind::Constant, s0(), 0.0};
        for (const auto& w : warps_) {
            const WarpTail& t = w.tail();
            if (t.kind == WarpTail::Kind::Unknown)
                return {};
            out.onset = std::max(out.onset, t.onset);
            if (t.kind == WarpTail::Kind::Periodic) {
                if (out.kind == TailDeclaration::Kind::Periodic &&
                    std::abs(out.period - t.period) > 1e-12 * std::abs(t.period))
                    return {};
                out.kind = TailDeclaration::Kind::Periodic;
                out.period = t.period;
            }
        }
        return out;
    }

    void check_index(int j) const {
        if (j < 1 || j > fiber_dim())
            throw DomainError("fiber index " + std::to_string(j) + " outside 1.." +
                              std::to_string(fiber_dim()));
    }

    void check_s(double s) const {
        if (!(s >= s0()))
            throw DomainError("s = " + std::to_string(s) + " lies below the cusp start");
    }

private:
    std::vector<WarpProfile> warps_;
    std::vector<double> fiber_volumes_;
};

struct CurvatureReport {
    double k_min = 0.0;
    double k_max = 0.0;
    double pinch = 0.0; // max |K - k_target| over the samples
    double k_target = 0.0;
    int sample_count = 0;
};

struct CurvatureSample {
    double s = 0.0;
    double k_min = 0.0;
    double k_max = 0.0;
};

/// K(d/ds, e_j) = w_j'' - (w_j')^2.
[[nodiscard]] inline double mixed_curvature(const TorusCuspMetric& metric, int j, double s) {
    metric.check_index(j);
    metric.check_s(s);
    const WarpProfile& w = metric.warp(j);
    const double d1 = w.deriv1(s);
    return w.deriv2(s) - d1 * d1;
}

/// K(e_i, e_j) = -w_i' w_j' for i != j.
[[nodiscard]] inline double fiber_curvature(const TorusCuspMetric& metric, int i, int j,
                                            double s) {
    if (metric.fiber_dim() < 2)
        throw UnsupportedError("fiber plane curvature needs at least two fiber directions");
    metric.check_index(i);
    metric.check_index(j);
    if (i == j)
        throw DomainError("fiber plane needs two distinct directions");
    metric.check_s(s);
    return -metric.warp(i).deriv1(s) * metric.warp(j).deriv1(s);
}

/// Extremes over all coordinate planes at each point of a uniform grid.
[[nodiscard]] inline std::vector<CurvatureSample>
curvature_samples(const TorusCuspMetric& metric, double s_lo, double s_hi, int grid_points) {
    if (grid_points < 2)
        throw DomainError("curvature grid needs at least two points");
    metric.check_s(s_lo);
    if (!(s_lo < s_hi))
        throw DomainError("curvature window must satisfy s_lo < s_hi");
    const int m = metric.fiber_dim();
    std::vector<CurvatureSample> out;
    out.reserve(static_cast<std::size_t>(grid_points));
    const double step = (s_hi - s_lo) / static_cast<double>(grid_points - 1);
    std::vector<double> d1(static_cast<std::size_t>(m));
    for (int k = 0; k < grid_points; ++k) {
        const double s = (k + 1 == grid_points) ? s_hi : s_lo + step * k;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (int j = 1; j <= m; ++j) {
            const WarpProfile& w = metric.warp(j);
            d1[static_cast<std::size_t>(j - 1)] = w.deriv1(s);
            const double kr = w.deriv2(s) - d1[static_cast<std::size_t>(j - 1)] *
                                                d1[static_cast<std::size_t>(j - 1)];
            lo = std::min(lo, kr);
            hi = std::max(hi, kr);
        }
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                const double kf = -d1[static_cast<std::size_t>(i)] * d1[static_cast<std::size_t>(j)];
                lo = std::min(lo, kf);
                hi = std::max(hi, kf);
            }
        out.push_back({s, lo, hi});
    }
    return out;
}

[[nodiscard]] inline CurvatureReport curvature_range(const TorusCuspMetric& metric, double s_lo,
                                                     double s_hi, int grid_points,
                                                     double k_target) {
    const auto samples = curvature_samples(metric, s_lo, s_hi, grid_points);
    CurvatureReport r;
    r.k_target = k_target;
    r.k_min = std::numeric_limits<double>::infinity();
    r.k_max = -r.k_min;
    for (const auto& c : samples) {
        r.k_min = std::min(r.k_min, c.k_min);
        r.k_max = std::max(r.k_max, c.k_max);
    }
    r.pinch = std::max(std::abs(r.k_min - k_target), std::abs(r.k_max - k_target));
    r.sample_count = static_cast<int>(samples.size());
    return r;
}

/// v(s) = prod_j L_j * exp(-sum_j w_j(s)); (ln v)' = -sum w_j', (ln v)'' = -sum w_j''.
[[nodiscard]] inline VolumeProfile volume_profile(const TorusCuspMetric& metric) {
    const double scale = std::accumulate(metric.fiber_volumes().begin(),
                                         metric.fiber_volumes().end(), 1.0,
                                         std::multiplies<>());
    auto warps = metric.warps();
    auto v = [warps, scale](double s) {
        double sum = 0.0;
        for (const auto& w : warps)
            sum += w.eval(s);
        return scale * std::exp(-sum);
    };
    auto d1 = [warps](double s) {
        double sum = 0.0;
        for (const auto& w : warps)
            sum += w.deriv1(s);
        return -sum;
    };
    auto d2 = [warps](double s) {
        double sum = 0.0;
        for (const auto& w : warps)
            sum += w.deriv2(s);
        return -sum;
    };
    return VolumeProfile(metric.s0(), v, d1, d2, metric.tail());
}

/// True iff a <= w_j'(s) <= b for every j on a uniform grid over [s0, s_hi].
/// For diagonal metrics this is a h <= S <= b h, which integrates to
/// exp(-2bs) h(0) <= h(s) <= exp(-2as) h(0).
[[nodiscard]] inline bool jacobi_envelope_check(const TorusCuspMetric& metric, double a, double b,
                                                double s_hi, int grid_points) {
    if (!(a > 0.0) || !(a <= b))
        throw DomainError("envelope requires 0 < a <= b");
    if (grid_points < 2 || !(s_hi > metric.s0()))
        throw DomainError("envelope grid must span (s0, s_hi] with at least two points");
    const double step = (s_hi - metric.s0()) / static_cast<double>(grid_points - 1);
    for (int k = 0; k < grid_points; ++k) {
        const double s = (k + 1 == grid_points) ? s_hi : metric.s0() + step * k;
        for (const auto& w : metric.warps()) {
            const double d = w.deriv1(s);
            if (d < a || d > b)
                return false;
        }
    }
    return true;
}

/// Two-dimensional cusp whose volume is
///   v(s) = exp(-s - delta * integral_0^{s-s0} p(u)(1 - phi(delta u)) du)
/// with the reference bump p and cutoff phi.  Unaltered (w = s) on [s0, s0 + 1/delta],
/// purely periodic perturbation of the slope beyond s0 + 2/delta.
[[nodiscard]] inline TorusCuspMetric theorem3_family(double delta, double s0,
                                                     const BumpParams& bump = {}) {
    return TorusCuspMetric({cutoff_bump_warp(delta, s0, bump)}, {1.0});
}

/// Start of the exactly periodic region of theorem3_family(delta, s0).
[[nodiscard]] inline double cutoff_tail_onset(double delta, double s0) { return s0 + 2.0 / delta; }

/// Closed-form bound on sup |K + 1| for theorem3_family(delta):
/// delta (2 |p|_inf + |p'|_inf) + 10 delta^2.
[[nodiscard]] inline double pinch_bound(double delta, const BumpParams& bump = {}) {
    const PeriodicBump p(bump);
    return delta * (2.0 * p.sup_norm() + p.deriv_sup_norm()) + 10.0 * delta * delta;
}

} // namespace cusp
