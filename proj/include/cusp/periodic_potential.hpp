#pragma once

#include "cusp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <utility>

namespace cusp {

/// q with q(s + T) = q(s), the coefficient of Hill's equation -u'' + q u = lambda u.
///
/// Periodicity is checked at construction on 32 pseudo-random points.
class PeriodicPotential {
public:
    using Fn = std::function<double(double)>;

    static constexpr double kPeriodicityTolerance = 1e-10;

    PeriodicPotential(double period, Fn q) : period_(period), q_(std::move(q)) {
        if (!(period_ > 0.0) || !std::isfinite(period_))
            throw DomainError("period must be positive and finite");
        if (!q_)
            throw DomainError("periodic potential needs an evaluator");
        verify_periodicity();
    }

    static PeriodicPotential constant(double c, double period = 1.0) {
        return PeriodicPotential(period, [c](double) { return c; });
    }

    [[nodiscard]] double period() const noexcept { return period_; }
    [[nodiscard]] double operator()(double s) const { return q_(s); }
    [[nodiscard]] const Fn& evaluator() const noexcept { return q_; }

    /// q(. + a)
    [[nodiscard]] PeriodicPotential shifted(double a) const {
        auto base = q_;
        return PeriodicPotential(period_, [base, a](double s) { return base(s + a); });
    }

    /// Sampled min / max over one period.
    [[nodiscard]] std::pair<double, double> sampled_range(int samples = 4096) const {
        double lo = q_(0.0);
        double hi = lo;
        for (int k = 1; k < samples; ++k) {
            const double v = q_(period_ * k / samples);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return {lo, hi};
    }

private:
    void verify_periodicity() const {
        std::mt19937_64 rng(0x5eedULL);
        std::uniform_real_distribution<double> dist(0.0, 4.0 * period_);
        for (int k = 0; k < 32; ++k) {
            const double s = dist(rng);
            const double a = q_(s);
            const double b = q_(s + period_);
            if (!std::isfinite(a) || !std::isfinite(b))
                throw DomainError("potential is not finite at s = " + std::to_string(s));
            if (std::abs(a - b) > kPeriodicityTolerance * std::max(1.0, std::abs(a)))
                throw DomainError("potential is not periodic with period " +
                                  std::to_string(period_));
        }
    }

    double period_;
    Fn q_;
};

} // namespace cusp
