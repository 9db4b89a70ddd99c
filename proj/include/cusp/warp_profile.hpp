#pragma once

#include "cusp/bump.hpp"
#include "cusp/errors.hpp"
#include "cusp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace cusp {

/// What a warp exponent looks like far out the cusp.
///
/// Affine: w' is constant for s >= onset.  Periodic: w' is periodic with the
/// given period for s >= onset.  Unknown: nothing is promised.
struct WarpTail {
    enum class Kind { Affine, Periodic, Unknown };

    Kind kind = Kind::Unknown;
    double onset = 0.0;
    double period = 0.0;
};

/// Logarithmic warp exponent w(s) of one torus factor, h_jj(s) = exp(-2 w(s)).
///
/// Immutable value type; copies share the underlying closures.  All three
/// evaluators reject s < s0.
class WarpProfile {
public:
    using Fn = std::function<double(double)>;

    WarpProfile(double s0, Fn value, Fn deriv1, Fn deriv2, WarpTail tail = {})
        : s0_(s0), value_(std::move(value)), deriv1_(std::move(deriv1)),
          deriv2_(std::move(deriv2)), tail_(tail) {
        if (!std::isfinite(s0_))
            throw DomainError("warp start s0 must be finite");
        if (!value_ || !deriv1_ || !deriv2_)
            throw DomainError("warp profile needs value and both derivatives");
    }

    /// w(s) = slope * s + offset.  slope = 1 is the constant-curvature -1 cusp.
    static WarpProfile affine(double s0, double slope, double offset = 0.0) {
        return WarpProfile(
            s0, [slope, offset](double s) { return slope * s + offset; },
            [slope](double) { return slope; }, [](double) { return 0.0; },
            WarpTail{WarpTail::Kind::Affine, s0, 0.0});
    }

    [[nodiscard]] double s0() const noexcept { return s0_; }
    [[nodiscard]] const WarpTail& tail() const noexcept { return tail_; }

    [[nodiscard]] double eval(double s) const {
        check(s);
        return value_(s);
    }
    [[nodiscard]] double deriv1(double s) const {
        check(s);
        return deriv1_(s);
    }
    [[nodiscard]] double deriv2(double s) const {
        check(s);
        return deriv2_(s);
    }

private:
    void check(double s) const {
        if (!(s >= s0_))
            throw DomainError("warp evaluated at s = " + std::to_string(s) +
                              " below the cusp start s0 = " + std::to_string(s0_));
    }

    double s0_;
    Fn value_;
    Fn deriv1_;
    Fn deriv2_;
    WarpTail tail_;
};

namespace detail {

// I(u) = integral_0^u p(x) (1 - phi(delta x)) dx for u >= 0.
//
// The integrand vanishes for u <= 1/delta and equals p for u >= 2/delta.  Cumulative
// values are cached on knots (spacing <= T/32) spanning the transition window and one
// period of p.  Knot segments and the remainder from the nearest knot use the same
// fixed Gauss-Legendre rule, so I is continuous across knots and smooth in u.  The
// cache is built on first use.
class CutoffBumpIntegral {
public:
    static constexpr std::size_t kMaxKnots = 20'000'000;
    static constexpr std::size_t kKnotsPerPeriod = 32;

    CutoffBumpIntegral(double delta, PeriodicBump bump) : delta_(delta), bump_(bump) {}

    [[nodiscard]] double integrand(double u) const {
        return bump_.value(u) * (1.0 - cutoff(delta_ * u));
    }

    [[nodiscard]] double operator()(double u) const {
        const double a = 1.0 / delta_;
        const double b = 2.0 / delta_;
        if (u <= a)
            return 0.0;
        std::call_once(built_, [this] { build(); });
        if (u <= b)
            return trans_at(u);
        return trans_total_ + periodic_at(u) - periodic_at(b);
    }

private:
    void build() const {
        const double a = 1.0 / delta_;
        const double b = 2.0 / delta_;
        const double T = bump_.period();
        const double target = T / static_cast<double>(kKnotsPerPeriod);
        const double span = b - a;
        const double n_real = std::ceil(span / target);
        if (!(n_real < static_cast<double>(kMaxKnots)))
            throw UnsupportedError("cutoff window too long to tabulate; delta is too small");
        const auto n = static_cast<std::size_t>(std::max(1.0, n_real));
        trans_step_ = span / static_cast<double>(n);
        trans_cum_.assign(n + 1, 0.0);
        auto g = [this](double x) { return integrand(x); };
        for (std::size_t k = 0; k < n; ++k) {
            const double lo = a + trans_step_ * static_cast<double>(k);
            const double hi = (k + 1 == n) ? b : lo + trans_step_;
            trans_cum_[k + 1] = trans_cum_[k] + quad::gauss_legendre(g, lo, hi);
        }
        trans_total_ = trans_cum_.back();

        period_step_ = T / static_cast<double>(kKnotsPerPeriod);
        period_cum_.assign(kKnotsPerPeriod + 1, 0.0);
        auto p = [this](double x) { return bump_.value(x); };
        for (std::size_t k = 0; k < kKnotsPerPeriod; ++k) {
            const double lo = period_step_ * static_cast<double>(k);
            period_cum_[k + 1] = period_cum_[k] + quad::gauss_legendre(p, lo, lo + period_step_);
        }
    }

    [[nodiscard]] double trans_at(double u) const {
        const double a = 1.0 / delta_;
        auto k = static_cast<std::size_t>((u - a) / trans_step_);
        k = std::min(k, trans_cum_.size() - 1);
        const double knot = a + trans_step_ * static_cast<double>(k);
        auto g = [this](double x) { return integrand(x); };
        return trans_cum_[k] + quad::gauss_legendre(g, knot, u);
    }

    // integral_0^x p
    [[nodiscard]] double periodic_at(double x) const {
        const double T = bump_.period();
        const double cycles = std::floor(x / T);
        const double r = x - cycles * T;
        auto k = static_cast<std::size_t>(r / period_step_);
        k = std::min<std::size_t>(k, kKnotsPerPeriod - 1);
        const double knot = period_step_ * static_cast<double>(k);
        auto p = [this](double t) { return bump_.value(t); };
        return cycles * period_cum_[kKnotsPerPeriod] + period_cum_[k] + quad::gauss_legendre(p, knot, r);
    }

    double delta_;
    PeriodicBump bump_;
    mutable std::once_flag built_;
    mutable double trans_step_ = 0.0;
    mutable double trans_total_ = 0.0;
    mutable std::vector<double> trans_cum_;
    mutable double period_step_ = 0.0;
    mutable std::vector<double> period_cum_;
};

} // namespace detail

/// Warp of the pinched cusp family:
///   w(s) = s + delta * integral_0^{s - s0} p(u) (1 - phi(delta u)) du.
/// Derivatives are closed form.  The tail is periodic from s0 + 2/delta on.
inline WarpProfile cutoff_bump_warp(double delta, double s0, const BumpParams& bump_params) {
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw DomainError("delta must be positive");
    const PeriodicBump bump(bump_params);
    auto integral = std::make_shared<const detail::CutoffBumpIntegral>(delta, bump);
    auto value = [integral, delta, s0](double s) { return s + delta * (*integral)(s - s0); };
    auto d1 = [bump, delta, s0](double s) {
        const double u = s - s0;
        return 1.0 + delta * bump.value(u) * (1.0 - cutoff(delta * u));
    };
    auto d2 = [bump, delta, s0](double s) {
        const double u = s - s0;
        return delta * (bump.deriv(u) * (1.0 - cutoff(delta * u)) -
                        delta * bump.value(u) * cutoff_deriv(delta * u));
    };
    return WarpProfile(s0, value, d1, d2,
                       WarpTail{WarpTail::Kind::Periodic, s0 + 2.0 / delta, bump.period()});
}

} // namespace cusp
