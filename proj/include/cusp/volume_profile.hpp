#pragma once

#include "cusp/errors.hpp"

#include <cmath>
#include <functional>
#include <utility>

namespace cusp {

/// Declared large-s behaviour of data that generates a potential.
///
/// Constant: log-derivatives are constant for s >= onset.  Periodic: they are
/// periodic with `period` for s >= onset.  Unknown: undeclared; such potentials
/// cannot be handed to the essential-spectrum routines.
struct TailDeclaration {
    enum class Kind { Constant, Periodic, Unknown };

    Kind kind = Kind::Unknown;
    double onset = 0.0;
    double period = 0.0;
};

/// Fiber volume v(s) of the cross-section {s} x N together with the closed-form
/// derivatives of ln v.
class VolumeProfile {
public:
    using Fn = std::function<double(double)>;

    VolumeProfile(double s0, Fn v, Fn log_deriv1, Fn log_deriv2, TailDeclaration tail = {})
        : s0_(s0), v_(std::move(v)), log_d1_(std::move(log_deriv1)),
          log_d2_(std::move(log_deriv2)), tail_(tail) {
        if (!v_ || !log_d1_ || !log_d2_)
            throw DomainError("volume profile needs v and both log-derivatives");
    }

    [[nodiscard]] double s0() const noexcept { return s0_; }
    [[nodiscard]] const TailDeclaration& tail() const noexcept { return tail_; }

    [[nodiscard]] double v(double s) const { return v_(s); }
    [[nodiscard]] double log_deriv1(double s) const { return log_d1_(s); }
    [[nodiscard]] double log_deriv2(double s) const { return log_d2_(s); }

    /// Same profile scaled by a positive constant.  Log-derivatives are unchanged.
    [[nodiscard]] VolumeProfile scaled(double c) const {
        if (!(c > 0.0))
            throw DomainError("volume scale must be positive");
        auto base = v_;
        return VolumeProfile(s0_, [base, c](double s) { return c * base(s); }, log_d1_, log_d2_,
                             tail_);
    }

private:
    double s0_;
    Fn v_;
    Fn log_d1_;
    Fn log_d2_;
    TailDeclaration tail_;
};

} // namespace cusp
