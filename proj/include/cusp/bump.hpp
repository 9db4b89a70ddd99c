#pragma once

#include "cusp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cusp {

/// Parameters of the reference periodic profile p used by the pinched cusp family.
///
/// p is the periodization of the compactly supported bump exp(-1/(1 - (4x)^2)),
/// |x| < 1/4, in units of one period.  It is even, C^infinity and not real-analytic.
/// With amplitude 1 the peak value is exactly 1.
struct BumpParams {
    double amplitude = 1.0;
    double period = 3.0;

    void validate() const {
        if (!(period > 0.0) || !std::isfinite(period))
            throw DomainError("bump period must be positive and finite");
        if (!std::isfinite(amplitude))
            throw DomainError("bump amplitude must be finite");
    }
};

namespace detail {

// exp(-1/x) for x > 0, else 0.
inline double smooth_step_kernel(double x) noexcept {
    return x > 0.0 ? std::exp(-1.0 / x) : 0.0;
}

inline double smooth_step_kernel_deriv(double x) noexcept {
    return x > 0.0 ? std::exp(-1.0 / x) / (x * x) : 0.0;
}

} // namespace detail

/// Reference periodic profile p(u) and its derivative, both closed form.
class PeriodicBump {
public:
    PeriodicBump() = default;
    explicit PeriodicBump(BumpParams params) : params_(params) { params_.validate(); }

    [[nodiscard]] const BumpParams& params() const noexcept { return params_; }
    [[nodiscard]] double period() const noexcept { return params_.period; }

    [[nodiscard]] double value(double u) const noexcept {
        const double x = reduce(u);
        const double y = 1.0 - 16.0 * x * x;
        if (y <= 0.0)
            return 0.0;
        return params_.amplitude * std::numbers::e * std::exp(-1.0 / y);
    }

    [[nodiscard]] double deriv(double u) const noexcept {
        const double x = reduce(u);
        const double y = 1.0 - 16.0 * x * x;
        if (y <= 0.0)
            return 0.0;
        const double b = std::numbers::e * std::exp(-1.0 / y);
        return params_.amplitude * b * (-32.0 * x) / (y * y) / params_.period;
    }

    /// sup |p|, attained at the bump centre.
    [[nodiscard]] double sup_norm() const noexcept { return std::abs(params_.amplitude); }

    /// sup |p'| located by golden-section search on the half-support.
    [[nodiscard]] double deriv_sup_norm() const noexcept {
        // |B'| on (0, 1/4) is unimodal
        double lo = 0.0;
        double hi = 0.25;
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        auto f = [&](double x) { return std::abs(deriv(x * params_.period)); };
        double a = hi - g * (hi - lo);
        double b = lo + g * (hi - lo);
        double fa = f(a);
        double fb = f(b);
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            if (fa > fb) {
                hi = b;
                b = a;
                fb = fa;
                a = hi - g * (hi - lo);
                fa = f(a);
            } else {
                lo = a;
                a = b;
                fa = fb;
                b = lo + g * (hi - lo);
                fb = f(b);
            }
        }
        return std::max(fa, fb);
    }

private:
    // u -> offset from the nearest bump centre, in units of one period
    [[nodiscard]] double reduce(double u) const noexcept {
        const double t = u / params_.period;
        return t - std::nearbyint(t);
    }

    BumpParams params_{};
};

/// Smooth nonincreasing cutoff: identically 1 on (-inf, 1], identically 0 on [2, inf).
[[nodiscard]] inline double cutoff(double t) noexcept {
    if (t <= 1.0)
        return 1.0;
    if (t >= 2.0)
        return 0.0;
    const double a = detail::smooth_step_kernel(2.0 - t);
    const double b = detail::smooth_step_kernel(t - 1.0);
    return a / (a + b);
}

[[nodiscard]] inline double cutoff_deriv(double t) noexcept {
    if (t <= 1.0 || t >= 2.0)
        return 0.0;
    const double a = detail::smooth_step_kernel(2.0 - t);
    const double b = detail::smooth_step_kernel(t - 1.0);
    const double da = -detail::smooth_step_kernel_deriv(2.0 - t);
    const double db = detail::smooth_step_kernel_deriv(t - 1.0);
    const double s = a + b;
    return (da * b - a * db) / (s * s);
}

} // namespace cusp
