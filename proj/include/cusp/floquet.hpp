#pragma once

// Band structure of Hill operators -u'' + q u = lambda u, q periodic with period T.
// The spectrum on the line is {lambda : |Delta(lambda)| <= 2}, Delta the trace of the
// period monodromy.  A half-line operator with a constant or periodic tail has the
// same essential spectrum as its tail.

#include "cusp/errors.hpp"
#include "cusp/ode.hpp"
#include "cusp/periodic_potential.hpp"
#include "cusp/reduction.hpp"
#include "cusp/warped_metric.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace cusp {

struct MonodromyMatrix {
    double lambda = 0.0;
    double m11 = 1.0;
    double m12 = 0.0;
    double m21 = 0.0;
    double m22 = 1.0;
    double integrator_tol = 0.0;

    [[nodiscard]] double trace() const noexcept { return m11 + m22; }
    [[nodiscard]] double det() const noexcept { return m11 * m22 - m12 * m21; }
};

struct FloquetOptions {
    double tol = 1e-12;          // integrator local error tolerance
    int threads = 1;             // discriminant evaluations run concurrently
    double tangency_floor = 1e-9; // |Delta| must exceed 2 by this much to open a gap
};

/// Columns are the solutions with (u, u')(0) = (1, 0) and (0, 1), evaluated at T.
[[nodiscard]] inline MonodromyMatrix monodromy(const PeriodicPotential& q, double lambda,
                                               double tol = 1e-12) {
    if (!(tol > 0.0))
        throw DomainError("monodromy tolerance must be positive");
    const auto& qf = q.evaluator();
    auto rhs = [&qf, lambda](double s, const ode::State<4>& y, ode::State<4>& dy) {
        const double c = qf(s) - lambda;
        dy[0] = y[1];
        dy[1] = c * y[0];
        dy[2] = y[3];
        dy[3] = c * y[2];
    };
    // a tenth of tol per step keeps the accumulated error over one period near tol
    ode::IntegratorOptions opts;
    opts.tol = 0.1 * tol;
    const auto y = ode::integrate<4>(rhs, 0.0, q.period(), {1.0, 0.0, 0.0, 1.0}, opts);
    return MonodromyMatrix{lambda, y[0], y[2], y[1], y[3], tol};
}

[[nodiscard]] inline double discriminant(const PeriodicPotential& q, double lambda,
                                         double tol = 1e-12) {
    return monodromy(q, lambda, tol).trace();
}

enum class EdgeKind {
    Plus2,     // root of Delta = +2
    Minus2,    // root of Delta = -2
    Threshold, // constant-tail threshold
    Cap,       // truncated at lambda_max
};

struct Band {
    double lower = 0.0;
    double upper = 0.0;
    EdgeKind lower_kind = EdgeKind::Plus2;
    EdgeKind upper_kind = EdgeKind::Cap;

    [[nodiscard]] double width() const noexcept { return upper - lower; }
    [[nodiscard]] bool contains(double x, double margin = 0.0) const noexcept {
        return x >= lower - margin && x <= upper + margin;
    }
};

struct Gap {
    double lower = 0.0;
    double upper = 0.0;
    bool resolved = true; // false when narrower than the scan resolution

    [[nodiscard]] double width() const noexcept { return upper - lower; }
};

struct ScanDiagnostics {
    long scan_points = 0;
    double scan_start = 0.0;
    double scan_step = 0.0;
    double max_det_defect = 0.0; // max |det M - 1| over the scan
};

struct BandStructure {
    double lambda_max = 0.0;
    double resolution = 0.0;
    std::vector<Band> bands;
    std::vector<Gap> gaps;
    ScanDiagnostics diagnostics;

    /// Distance from x to the union of the bands (0 inside a band).
    [[nodiscard]] double distance_to_bands(double x) const noexcept {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& b : bands) {
            if (b.contains(x))
                return 0.0;
            best = std::min(best, x < b.lower ? b.lower - x : x - b.upper);
        }
        return best;
    }
};

namespace detail {

inline std::vector<Gap> gaps_between(const std::vector<Band>& bands, double resolution) {
    std::vector<Gap> gaps;
    for (std::size_t i = 1; i < bands.size(); ++i) {
        Gap g{bands[i - 1].upper, bands[i].lower, true};
        g.resolved = g.width() >= resolution;
        gaps.push_back(g);
    }
    return gaps;
}

// Illinois false position on a sign-changing bracket.
template <class F>
double polish_root(const F& g, double a, double b, double ga, double gb) {
    if (ga == 0.0)
        return a;
    if (gb == 0.0)
        return b;
    int side = 0;
    for (int it = 0; it < 200; ++it) {
        double c = (a * gb - b * ga) / (gb - ga);
        if (!(c > std::min(a, b) && c < std::max(a, b)))
            c = 0.5 * (a + b);
        const double gc = g(c);
        // run to roundoff: near a narrow gap Delta' is small, so |Delta -+ 2| <= 1e-10
        // alone could leave the edge off by ~1e-7
        if (gc == 0.0)
            return c;
        if ((gc > 0.0) == (gb > 0.0)) {
            b = c;
            gb = gc;
            if (side == -1)
                ga *= 0.5;
            side = -1;
        } else {
            a = c;
            ga = gc;
            if (side == +1)
                gb *= 0.5;
            side = +1;
        }
        if (std::abs(b - a) <= 1e-13 * std::max(1.0, std::abs(c)))
            return c;
    }
    return 0.5 * (a + b);
}

// Golden-section search for the maximum of f on [a, b]; returns (argmax, max).
template <class F>
std::pair<double, double> golden_max(const F& f, double a, double b) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - g * (b - a);
    double x2 = a + g * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int it = 0; it < 100 && (b - a) > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    return f1 > f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

struct EdgeEvent {
    double lambda;
    EdgeKind kind;
};

} // namespace detail

/// Uniform scan grid used by band_structure: anchored at min q - 1, step
/// min(10 resolution, pi^2 / (4 T^2)), with lambda_max appended.
[[nodiscard]] inline std::vector<double> scan_grid(const PeriodicPotential& q, double lambda_max,
                                                   double resolution) {
    if (!(resolution > 0.0))
        throw DomainError("resolution must be positive");
    const auto [qmin, qmax] = q.sampled_range();
    (void)qmax;
    if (!(lambda_max > qmin))
        throw DomainError("lambda_max must exceed min q");
    const double T = q.period();
    const double step =
        std::min(10.0 * resolution, std::numbers::pi * std::numbers::pi / (4.0 * T * T));
    const double start = qmin - 1.0;
    std::vector<double> grid;
    for (long k = 0;; ++k) {
        const double x = start + step * static_cast<double>(k);
        if (x >= lambda_max)
            break;
        grid.push_back(x);
    }
    grid.push_back(lambda_max);
    return grid;
}

/// Monodromy matrices at every grid point, evaluated on `threads` workers.
[[nodiscard]] inline std::vector<MonodromyMatrix>
monodromy_scan(const PeriodicPotential& q, const std::vector<double>& grid, double tol,
               int threads = 1) {
    std::vector<MonodromyMatrix> out(grid.size());
    const auto n = grid.size();
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || n < 64) {
        for (std::size_t k = 0; k < n; ++k)
            out[k] = monodromy(q, grid[k], tol);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t k = w; k < n; k += workers)
                    out[k] = monodromy(q, grid[k], tol);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

/// Bands and gaps of -d^2 + q below lambda_max.
///
/// Roots of Delta -+ 2 are bracketed on the scan grid, tangential near-misses are
/// resolved by maximizing |Delta| around discrete extrema, and every root is polished
/// to |Delta -+ 2| <= 1e-10.  Throws RefinementError when the assembled edges are
/// inconsistent with the sampled values of Delta.
[[nodiscard]] inline BandStructure band_structure(const PeriodicPotential& q, double lambda_max,
                                                  double resolution,
                                                  const FloquetOptions& opts = {}) {
    const auto grid = scan_grid(q, lambda_max, resolution);
    const auto mats = monodromy_scan(q, grid, opts.tol, opts.threads);
    const std::size_t n = grid.size();

    BandStructure out;
    out.lambda_max = lambda_max;
    out.resolution = resolution;
    out.diagnostics.scan_points = static_cast<long>(n);
    out.diagnostics.scan_start = grid.front();
    out.diagnostics.scan_step = n > 1 ? grid[1] - grid[0] : 0.0;
    std::vector<double> D(n);
    for (std::size_t k = 0; k < n; ++k) {
        D[k] = mats[k].trace();
        out.diagnostics.max_det_defect =
            std::max(out.diagnostics.max_det_defect, std::abs(mats[k].det() - 1.0));
    }
    if (!(D.front() > 2.0))
        throw NumericalError("discriminant at the scan start is not above 2");

    auto Delta = [&](double x) { return discriminant(q, x, opts.tol); };
    std::vector<detail::EdgeEvent> events;

    auto add_root = [&](double a, double b, double da, double db, double target) {
        auto g = [&](double x) { return Delta(x) - target; };
        const double r = detail::polish_root(g, a, b, da - target, db - target);
        events.push_back({r, target > 0 ? EdgeKind::Plus2 : EdgeKind::Minus2});
    };

    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double a = grid[k];
        const double b = grid[k + 1];
        for (double target : {2.0, -2.0}) {
            const bool sa = D[k] - target >= 0.0;
            const bool sb = D[k + 1] - target >= 0.0;
            if (sa != sb)
                add_root(a, b, D[k], D[k + 1], target);
        }
    }

    // local extrema that stay inside [-2, 2] on the grid but may cross between samples
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const bool is_max = D[k] >= D[k - 1] && D[k] >= D[k + 1];
        const bool is_min = D[k] <= D[k - 1] && D[k] <= D[k + 1];
        if (is_max && D[k] <= 2.0 && D[k] >= 1.0) {
            const auto [xm, fm] = detail::golden_max(Delta, grid[k - 1], grid[k + 1]);
            if (fm > 2.0 + opts.tangency_floor) {
                add_root(grid[k - 1], xm, D[k - 1], fm, 2.0);
                add_root(xm, grid[k + 1], fm, D[k + 1], 2.0);
            }
        } else if (is_min && D[k] >= -2.0 && D[k] <= -1.0) {
            auto neg = [&](double x) { return -Delta(x); };
            const auto [xm, fm] = detail::golden_max(neg, grid[k - 1], grid[k + 1]);
            if (-fm < -2.0 - opts.tangency_floor) {
                add_root(grid[k - 1], xm, D[k - 1], -fm, -2.0);
                add_root(xm, grid[k + 1], -fm, D[k + 1], -2.0);
            }
        }
    }

    std::sort(events.begin(), events.end(),
              [](const auto& l, const auto& r) { return l.lambda < r.lambda; });

    // Each simple root toggles between |Delta| > 2 and |Delta| <= 2.
    bool inside = false;
    Band current;
    for (const auto& e : events) {
        if (!inside) {
            current = Band{e.lambda, e.lambda, e.kind, EdgeKind::Cap};
        } else {
            current.upper = e.lambda;
            current.upper_kind = e.kind;
            out.bands.push_back(current);
        }
        inside = !inside;
    }
    if (inside) {
        current.upper = lambda_max;
        current.upper_kind = EdgeKind::Cap;
        out.bands.push_back(current);
    }

    // gaps whose interior never clears the tangency floor are closed gaps seen through noise
    {
        std::vector<Band> kept;
        for (const auto& b : out.bands) {
            if (!kept.empty()) {
                const double mid = 0.5 * (kept.back().upper + b.lower);
                if (std::abs(Delta(mid)) - 2.0 < opts.tangency_floor) {
                    kept.back().upper = b.upper;
                    kept.back().upper_kind = b.upper_kind;
                    continue;
                }
            }
            kept.push_back(b);
        }
        out.bands = std::move(kept);
    }

    auto refinement_failure = [&](const std::string& what) {
        std::ostringstream msg;
        msg << what << "; a band edge was probably skipped, retry with a smaller resolution than "
            << resolution;
        throw RefinementError(msg.str());
    };

    if (!out.bands.empty() && out.bands.front().lower_kind != EdgeKind::Plus2)
        refinement_failure("lowest band does not start at a root of Delta = 2");
    for (std::size_t i = 1; i < out.bands.size(); ++i)
        if (out.bands[i - 1].upper_kind != out.bands[i].lower_kind)
            refinement_failure("gap edges at " + std::to_string(out.bands[i - 1].upper) + " and " +
                               std::to_string(out.bands[i].lower) + " have different root types");
    // sampled classification must agree with the assembled bands
    for (std::size_t k = 0; k < n; ++k) {
        const bool in_band = std::abs(D[k]) <= 2.0;
        bool assembled = false;
        for (const auto& b : out.bands)
            if (grid[k] >= b.lower && grid[k] <= b.upper) {
                assembled = true;
                break;
            }
        const double slack = std::abs(std::abs(D[k]) - 2.0);
        if (in_band != assembled && slack > 1e-8)
            refinement_failure("sample at lambda = " + std::to_string(grid[k]) +
                               " disagrees with the assembled bands");
    }

    out.gaps = detail::gaps_between(out.bands, resolution);
    return out;
}

/// Union of band structures, overlapping bands merged.
[[nodiscard]] inline BandStructure merge_band_structures(const std::vector<BandStructure>& parts,
                                                         double lambda_max, double resolution) {
    BandStructure out;
    out.lambda_max = lambda_max;
    out.resolution = resolution;
    std::vector<Band> all;
    for (const auto& p : parts) {
        all.insert(all.end(), p.bands.begin(), p.bands.end());
        out.diagnostics.scan_points += p.diagnostics.scan_points;
        out.diagnostics.max_det_defect =
            std::max(out.diagnostics.max_det_defect, p.diagnostics.max_det_defect);
    }
    std::sort(all.begin(), all.end(),
              [](const Band& a, const Band& b) { return a.lower < b.lower; });
    for (const auto& b : all) {
        if (!out.bands.empty() && b.lower <= out.bands.back().upper) {
            if (b.upper > out.bands.back().upper) {
                out.bands.back().upper = b.upper;
                out.bands.back().upper_kind = b.upper_kind;
            }
        } else {
            out.bands.push_back(b);
        }
    }
    out.gaps = detail::gaps_between(out.bands, resolution);
    return out;
}

/// Essential spectrum of a half-line operator, read off its tail.
/// The head of the potential and the boundary condition do not enter.
[[nodiscard]] inline BandStructure essential_spectrum_halfline(const SchrodingerPotential& W,
                                                               double lambda_max,
                                                               double resolution,
                                                               const FloquetOptions& opts = {}) {
    if (!(resolution > 0.0))
        throw DomainError("resolution must be positive");
    if (const auto* c = std::get_if<ConstantTail>(&W.tail())) {
        BandStructure out;
        out.lambda_max = lambda_max;
        out.resolution = resolution;
        if (lambda_max > c->value)
            out.bands.push_back({c->value, lambda_max, EdgeKind::Threshold, EdgeKind::Cap});
        return out;
    }
    if (const auto* p = std::get_if<PeriodicTail>(&W.tail()))
        return band_structure(p->potential, lambda_max, resolution, opts);
    throw DomainError("potential has no classified tail");
}

/// Essential spectrum of the p-form Laplacian of a torus cusp: union over the
/// degree-p channels.
[[nodiscard]] inline BandStructure p_form_essential_spectrum(const TorusCuspMetric& metric, int p,
                                                             double lambda_max, double resolution,
                                                             const FloquetOptions& opts = {}) {
    std::vector<BandStructure> parts;
    for (const auto& ch : channels_for_degree(metric, p))
        parts.push_back(essential_spectrum_halfline(ch.potential, lambda_max, resolution, opts));
    return merge_band_structures(parts, lambda_max, resolution);
}

} // namespace cusp
