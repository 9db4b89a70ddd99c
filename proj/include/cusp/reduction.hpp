#pragma once

// Reduction of cusp geometry to half-line Schrodinger operators -d^2/ds^2 + W(s).
//
// For a flat-torus fiber the bounded-energy forms are spanned by dx^J, J a subset of
// {1..m}.  The form d/ds acts channel by channel between L^2(rho_J ds) spaces, with
//   rho_J = exp(2 sum_{j in J} w_j - sum_j w_j),    mu_J = (ln rho_J)'.
// Conjugating by rho_J^{1/2} turns A*A and AA* into -d^2 + mu^2/4 +- mu'/2.  The
// degree-0 channel has rho = v and reproduces -d^2 + (ln v)''/2 + ((ln v)')^2/4.

#include "cusp/errors.hpp"
#include "cusp/periodic_potential.hpp"
#include "cusp/volume_profile.hpp"
#include "cusp/warped_metric.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cusp {

struct Dirichlet {};

/// k'(s0) = -beta k(s0)
struct Robin {
    double beta = 0.0;
};

using BoundaryCondition = std::variant<Dirichlet, Robin>;

struct ConstantTail {
    double value = 0.0;
    double onset = 0.0;
};

/// W(s) = potential(s - onset) for s >= onset.
struct PeriodicTail {
    PeriodicPotential potential;
    double onset = 0.0;
};

using TailDescriptor = std::variant<std::monostate, ConstantTail, PeriodicTail>;

/// Raw potential plus the tail its generating data promises; input of tail_classify.
struct RawPotential {
    double s0 = 0.0;
    std::function<double(double)> W;
    TailDeclaration declared;
};

inline constexpr double kTailTolerance = 1e-10;
inline constexpr int kTailSamples = 64;

/// Verifies the declared tail of `raw` and extracts it.
/// Undeclared tails come back as std::monostate.
[[nodiscard]] inline TailDescriptor tail_classify(const RawPotential& raw) {
    const TailDeclaration& d = raw.declared;
    if (d.kind == TailDeclaration::Kind::Unknown)
        return std::monostate{};
    const double onset = std::max(d.onset, raw.s0);

    if (d.kind == TailDeclaration::Kind::Constant) {
        const double c = raw.W(onset);
        double worst = 0.0;
        for (int k = 0; k < kTailSamples; ++k) {
            const double s = onset + 64.0 * k / (kTailSamples - 1);
            worst = std::max(worst, std::abs(raw.W(s) - c) / std::max(1.0, std::abs(c)));
        }
        if (!(worst <= kTailTolerance))
            throw ClassificationError("declared constant tail deviates by " +
                                          std::to_string(worst),
                                      worst);
        return ConstantTail{c, onset};
    }

    const double T = d.period;
    if (!(T > 0.0))
        throw ClassificationError("periodic tail declared without a period", 0.0);
    double worst = 0.0;
    for (int k = 0; k < kTailSamples; ++k) {
        const double s = onset + 4.0 * T * (k + 0.5) / kTailSamples;
        const double a = raw.W(s);
        worst = std::max(worst, std::abs(raw.W(s + T) - a) / std::max(1.0, std::abs(a)));
    }
    if (!(worst <= kTailTolerance))
        throw ClassificationError("declared periodic tail deviates by " + std::to_string(worst),
                                  worst);
    auto W = raw.W;
    return PeriodicTail{PeriodicPotential(T, [W, onset](double t) { return W(onset + t); }),
                        onset};
}

/// -d^2/ds^2 + W(s) on [s0, inf) with a boundary condition at s0 and a classified tail.
class SchrodingerPotential {
public:
    using Fn = std::function<double(double)>;

    SchrodingerPotential(double s0, Fn W, TailDescriptor tail, BoundaryCondition boundary = Dirichlet{})
        : s0_(s0), W_(std::move(W)), tail_(std::move(tail)), boundary_(boundary) {}

    [[nodiscard]] double s0() const noexcept { return s0_; }
    [[nodiscard]] double operator()(double s) const { return W_(s); }
    [[nodiscard]] const Fn& evaluator() const noexcept { return W_; }
    [[nodiscard]] const TailDescriptor& tail() const noexcept { return tail_; }
    [[nodiscard]] const BoundaryCondition& boundary() const noexcept { return boundary_; }

    [[nodiscard]] bool has_tail() const noexcept {
        return !std::holds_alternative<std::monostate>(tail_);
    }

    /// s* beyond which the tail holds exactly.
    [[nodiscard]] double tail_onset() const {
        if (const auto* c = std::get_if<ConstantTail>(&tail_))
            return c->onset;
        if (const auto* p = std::get_if<PeriodicTail>(&tail_))
            return p->onset;
        throw DomainError("potential has no classified tail");
    }

private:
    double s0_;
    Fn W_;
    TailDescriptor tail_;
    BoundaryCondition boundary_;
};

/// W = (ln v)''/2 + ((ln v)')^2/4 with Dirichlet condition at s0.
[[nodiscard]] inline SchrodingerPotential potential_from_volume(const VolumeProfile& v) {
    auto W = [v](double s) {
        const double d1 = v.log_deriv1(s);
        return 0.5 * v.log_deriv2(s) + 0.25 * d1 * d1;
    };
    auto tail = tail_classify(RawPotential{v.s0(), W, v.tail()});
    return SchrodingerPotential(v.s0(), W, std::move(tail), Dirichlet{});
}

/// Periodic function with closed-form derivative.
struct PeriodicFunction {
    double period = 1.0;
    std::function<double(double)> value;
    std::function<double(double)> deriv;
};

/// V_P = P'/2 + P^2/4, periodic from s0 on.
[[nodiscard]] inline SchrodingerPotential vp_from_periodic(const PeriodicFunction& P,
                                                           double s0 = 0.0) {
    if (!P.value || !P.deriv)
        throw DomainError("periodic function needs value and derivative");
    auto value = P.value;
    auto deriv = P.deriv;
    auto V = [value, deriv](double s) {
        const double p = value(s);
        return 0.5 * deriv(s) + 0.25 * p * p;
    };
    PeriodicTail tail{PeriodicPotential(P.period, [V, s0](double t) { return V(s0 + t); }), s0};
    return SchrodingerPotential(s0, V, std::move(tail), Dirichlet{});
}

/// P(s) = -1 - delta p(s - s0): the log-volume slope of theorem3_family in its tail.
[[nodiscard]] inline PeriodicFunction cutoff_tail_slope(double delta, double s0,
                                                        const BumpParams& bump = {}) {
    const PeriodicBump p(bump);
    return PeriodicFunction{p.period(),
                            [p, delta, s0](double s) { return -1.0 - delta * p.value(s - s0); },
                            [p, delta, s0](double s) { return -delta * p.deriv(s - s0); }};
}

enum class ChannelKind { Tangential, Normal };

/// One scalar channel of the degree-p operator.
///
/// Tangential: coefficient of dx^J, degree |J|, potential mu^2/4 + mu'/2, Dirichlet.
/// Normal: coefficient of ds ^ dx^J, degree |J| + 1, potential mu^2/4 - mu'/2,
/// natural condition k' + (mu/2) k = 0.
struct FormChannel {
    std::vector<int> multi_index;
    ChannelKind kind = ChannelKind::Tangential;
    std::function<double(double)> mu;
    std::function<double(double)> mu_deriv;
    SchrodingerPotential potential;
    int degree = 0;
};

namespace detail {

inline void subsets_of_size(int m, int k, int first, std::vector<int>& cur,
                            std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == k) {
        out.push_back(cur);
        return;
    }
    for (int j = first; j <= m; ++j) {
        cur.push_back(j);
        subsets_of_size(m, k, j + 1, cur, out);
        cur.pop_back();
    }
}

} // namespace detail

/// All subsets of {1..m} with k elements, lexicographic order.
[[nodiscard]] inline std::vector<std::vector<int>> subsets_of_size(int m, int k) {
    std::vector<std::vector<int>> out;
    if (k < 0 || k > m)
        return out;
    std::vector<int> cur;
    detail::subsets_of_size(m, k, 1, cur, out);
    return out;
}

[[nodiscard]] inline FormChannel make_channel(const TorusCuspMetric& metric, std::vector<int> J,
                                              ChannelKind kind) {
    std::vector<double> weight(static_cast<std::size_t>(metric.fiber_dim()), -1.0);
    for (int j : J)
        weight[static_cast<std::size_t>(j - 1)] = 1.0;
    auto warps = metric.warps();
    auto mu = [warps, weight](double s) {
        double sum = 0.0;
        for (std::size_t j = 0; j < warps.size(); ++j)
            sum += weight[j] * warps[j].deriv1(s);
        return sum;
    };
    auto mu_d = [warps, weight](double s) {
        double sum = 0.0;
        for (std::size_t j = 0; j < warps.size(); ++j)
            sum += weight[j] * warps[j].deriv2(s);
        return sum;
    };
    const double sign = kind == ChannelKind::Tangential ? 0.5 : -0.5;
    auto W = [mu, mu_d, sign](double s) {
        const double m = mu(s);
        return 0.25 * m * m + sign * mu_d(s);
    };
    auto tail = tail_classify(RawPotential{metric.s0(), W, metric.tail()});
    BoundaryCondition bc = Dirichlet{};
    if (kind == ChannelKind::Normal)
        bc = Robin{0.5 * mu(metric.s0())};
    const int degree = static_cast<int>(J.size()) + (kind == ChannelKind::Normal ? 1 : 0);
    return FormChannel{std::move(J), kind, mu, mu_d,
                       SchrodingerPotential(metric.s0(), W, std::move(tail), bc), degree};
}

/// Channels of total degree p: C(m, p) tangential followed by C(m, p-1) normal.
[[nodiscard]] inline std::vector<FormChannel> channels_for_degree(const TorusCuspMetric& metric,
                                                                  int p) {
    const int m = metric.fiber_dim();
    if (p < 0 || p > m + 1)
        throw DomainError("form degree " + std::to_string(p) + " outside 0.." +
                          std::to_string(m + 1));
    std::vector<FormChannel> out;
    for (auto& J : subsets_of_size(m, p))
        out.push_back(make_channel(metric, std::move(J), ChannelKind::Tangential));
    for (auto& J : subsets_of_size(m, p - 1))
        out.push_back(make_channel(metric, std::move(J), ChannelKind::Normal));
    return out;
}

} // namespace cusp
