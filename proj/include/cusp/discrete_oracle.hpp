#pragma once

// Finite-difference truncation of half-line operators on [s0, s0 + L].
// Independent of the Floquet machinery; used to cross-check it.

#include "cusp/errors.hpp"
#include "cusp/floquet.hpp"
#include "cusp/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

namespace cusp {

struct Grid {
    double s0 = 0.0;
    double length = 1.0;
    int points = 16;

    Grid() = default;
    Grid(double s0_, double length_, int points_) : s0(s0_), length(length_), points(points_) {
        validate();
    }

    void validate() const {
        if (points < 16)
            throw DomainError("grid needs at least 16 intervals");
        if (!(length > 0.0) || !std::isfinite(length))
            throw DomainError("grid length must be positive");
    }

    [[nodiscard]] double spacing() const noexcept { return length / points; }
    [[nodiscard]] double node(int i) const noexcept { return s0 + spacing() * i; }
};

/// Symmetric tridiagonal matrix acting on the unknowns at `nodes`.
struct TridiagonalOperator {
    std::vector<double> diagonal;
    std::vector<double> off_diagonal; // size diagonal.size() - 1
    std::vector<double> nodes;        // location of each unknown
    Grid grid;
    BoundaryCondition bc = Dirichlet{};

    [[nodiscard]] std::size_t size() const noexcept { return diagonal.size(); }

    /// Copy with `c` added to the diagonal.
    [[nodiscard]] TridiagonalOperator shifted(double c) const {
        TridiagonalOperator out = *this;
        for (double& d : out.diagonal)
            d += c;
        return out;
    }
};

/// -k'' + W k by second-order central differences.  Dirichlet drops the boundary node;
/// Robin(beta) keeps it and eliminates the ghost node through k'(s0) = -beta k(s0)
/// (row and column scaled by sqrt 2 to restore symmetry).  The far end is Dirichlet.
[[nodiscard]] inline TridiagonalOperator discretize_schrodinger(const SchrodingerPotential& W,
                                                                const Grid& grid,
                                                                const BoundaryCondition& bc) {
    grid.validate();
    const double h = grid.spacing();
    const double inv_h2 = 1.0 / (h * h);
    TridiagonalOperator op;
    op.grid = grid;
    op.bc = bc;
    const bool robin = std::holds_alternative<Robin>(bc);
    const int first = robin ? 0 : 1;
    for (int i = first; i < grid.points; ++i) {
        const double s = grid.node(i);
        op.nodes.push_back(s);
        op.diagonal.push_back(2.0 * inv_h2 + W(s));
    }
    op.off_diagonal.assign(op.diagonal.size() - 1, -inv_h2);
    if (robin) {
        const double beta = std::get<Robin>(bc).beta;
        if (!std::isfinite(beta))
            throw DomainError("Robin coefficient must be finite");
        op.diagonal[0] -= 2.0 * beta / h;
        op.off_diagonal[0] = -std::numbers::sqrt2 * inv_h2;
    }
    return op;
}

[[nodiscard]] inline TridiagonalOperator discretize_schrodinger(const SchrodingerPotential& W,
                                                                const Grid& grid) {
    return discretize_schrodinger(W, grid, W.boundary());
}

/// Forward difference between weighted spaces, in orthonormal coordinates.
///
/// Maps values at interior nodes 1..N-1 (Dirichlet) to half nodes 1/2..N-1/2:
///   (A k)_{r+1/2} = sqrt(rho_{r+1/2}) (k_{r+1}/sqrt(rho_{r+1}) - k_r/sqrt(rho_r)) / h.
/// Row r holds `minus[r]` in column r and `plus[r]` in column r+1.
struct WeightedDifference {
    std::vector<double> minus; // size N, minus[0] unused (boundary column removed)
    std::vector<double> plus;  // size N, plus[N-1] unused
    int rows = 0;
    int cols = 0;

    /// y = A x, x indexed by interior node 1..N-1 (x[j-1]).
    [[nodiscard]] std::vector<double> apply(const std::vector<double>& x) const {
        std::vector<double> y(static_cast<std::size_t>(rows), 0.0);
        for (int r = 0; r < rows; ++r) {
            double v = 0.0;
            if (r >= 1)
                v += minus[static_cast<std::size_t>(r)] * x[static_cast<std::size_t>(r - 1)];
            if (r + 1 <= cols)
                v += plus[static_cast<std::size_t>(r)] * x[static_cast<std::size_t>(r)];
            y[static_cast<std::size_t>(r)] = v;
        }
        return y;
    }
};

struct WeightedDiscretization {
    WeightedDifference A;
    TridiagonalOperator AstarA; // on interior nodes, Dirichlet
    TridiagonalOperator AAstar; // on half nodes, natural boundary condition
};

/// Discrete realization of the channel form |A k|^2 with weight rho.  A*A and AA*
/// are assembled from the entries of A, so their nonzero spectra coincide exactly.
[[nodiscard]] inline WeightedDiscretization
discretize_weighted(const std::function<double(double)>& rho, const Grid& grid) {
    grid.validate();
    const int N = grid.points;
    const double h = grid.spacing();
    std::vector<double> node(static_cast<std::size_t>(N + 1));
    std::vector<double> half(static_cast<std::size_t>(N));
    for (int i = 0; i <= N; ++i) {
        node[static_cast<std::size_t>(i)] = rho(grid.node(i));
        if (!(node[static_cast<std::size_t>(i)] > 0.0) || !std::isfinite(node[static_cast<std::size_t>(i)]))
            throw DomainError("weight must be positive at s = " + std::to_string(grid.node(i)));
    }
    for (int i = 0; i < N; ++i) {
        const double s = grid.s0 + h * (i + 0.5);
        half[static_cast<std::size_t>(i)] = rho(s);
        if (!(half[static_cast<std::size_t>(i)] > 0.0) || !std::isfinite(half[static_cast<std::size_t>(i)]))
            throw DomainError("weight must be positive at s = " + std::to_string(s));
    }

    WeightedDiscretization out;
    auto& A = out.A;
    A.rows = N;
    A.cols = N - 1;
    A.minus.assign(static_cast<std::size_t>(N), 0.0);
    A.plus.assign(static_cast<std::size_t>(N), 0.0);
    for (int r = 0; r < N; ++r) {
        const auto ur = static_cast<std::size_t>(r);
        if (r >= 1)
            A.minus[ur] = -std::sqrt(half[ur] / node[ur]) / h;
        if (r + 1 <= N - 1)
            A.plus[ur] = std::sqrt(half[ur] / node[ur + 1]) / h;
    }

    // A*A: column j (node j, 1..N-1) meets rows j-1 (plus) and j (minus)
    auto& P = out.AstarA;
    P.grid = grid;
    P.bc = Dirichlet{};
    for (int j = 1; j <= N - 1; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        P.nodes.push_back(grid.node(j));
        P.diagonal.push_back(A.plus[uj - 1] * A.plus[uj - 1] + A.minus[uj] * A.minus[uj]);
        if (j < N - 1)
            P.off_diagonal.push_back(A.minus[uj] * A.plus[uj]);
    }

    // AA*: rows r and r+1 share column r+1
    auto& Q = out.AAstar;
    Q.grid = grid;
    const double mu0 = (std::log(half[0]) - std::log(node[0])) / (0.5 * h);
    Q.bc = Robin{0.5 * mu0};
    for (int r = 0; r < N; ++r) {
        const auto ur = static_cast<std::size_t>(r);
        Q.nodes.push_back(grid.s0 + h * (r + 0.5));
        Q.diagonal.push_back(A.minus[ur] * A.minus[ur] + A.plus[ur] * A.plus[ur]);
        if (r + 1 < N)
            Q.off_diagonal.push_back(A.plus[ur] * A.minus[ur + 1]);
    }
    return out;
}

namespace detail {

// Number of eigenvalues strictly below x (Sturm sequence / LDL^T inertia).
inline std::size_t sturm_count(const std::vector<double>& a, const std::vector<double>& b2,
                               double x, double pivmin) {
    std::size_t count = 0;
    double d = a[0] - x;
    if (std::abs(d) < pivmin)
        d = -pivmin;
    if (d < 0.0)
        ++count;
    for (std::size_t i = 1; i < a.size(); ++i) {
        d = (a[i] - x) - b2[i - 1] / d;
        if (std::abs(d) < pivmin)
            d = -pivmin;
        if (d < 0.0)
            ++count;
    }
    return count;
}

} // namespace detail

/// Every eigenvalue <= lambda_max, ascending, by Sturm-sequence bisection.  Each is
/// located to 1e-10 * max(1, |lambda|).
inline constexpr double kRoundoff = 4.0 * std::numeric_limits<double>::epsilon();

[[nodiscard]] inline std::vector<double> eigenvalues_below(const TridiagonalOperator& op,
                                                           double lambda_max) {
    const auto& a = op.diagonal;
    if (a.empty())
        return {};
    std::vector<double> b2(op.off_diagonal.size());
    double bmax = 0.0;
    for (std::size_t i = 0; i < b2.size(); ++i) {
        b2[i] = op.off_diagonal[i] * op.off_diagonal[i];
        bmax = std::max(bmax, std::abs(op.off_diagonal[i]));
    }
    double lo = std::numeric_limits<double>::infinity();
    double norm = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double r = (i > 0 ? std::abs(op.off_diagonal[i - 1]) : 0.0) +
                         (i + 1 < a.size() ? std::abs(op.off_diagonal[i]) : 0.0);
        lo = std::min(lo, a[i] - r);
        norm = std::max(norm, std::abs(a[i]) + r);
    }
    const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, bmax * bmax);
    lo -= 1e-8 * std::max(1.0, norm);
    const double hi = std::nextafter(lambda_max, std::numeric_limits<double>::infinity());
    if (!(hi > lo))
        return {};
    auto count = [&](double x) { return detail::sturm_count(a, b2, x, pivmin); };

    std::vector<double> out;
    struct Interval {
        double lo, hi;
        std::size_t clo, chi;
    };
    std::vector<Interval> stack{{lo, hi, count(lo), count(hi)}};
    while (!stack.empty()) {
        const Interval iv = stack.back();
        stack.pop_back();
        if (iv.chi <= iv.clo)
            continue;
        const double mid = 0.5 * (iv.lo + iv.hi);
        if (iv.hi - iv.lo <= kRoundoff * std::max(1.0, std::abs(mid)) || mid <= iv.lo ||
            mid >= iv.hi) {
            out.insert(out.end(), iv.chi - iv.clo, mid);
            continue;
        }
        const std::size_t cm = count(mid);
        // push upper half first so the lower half is processed next
        stack.push_back({mid, iv.hi, cm, iv.chi});
        stack.push_back({iv.lo, mid, iv.clo, cm});
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct GapCount {
    int gap_index = 0;
    double lower = 0.0;
    double upper = 0.0;
    int count = 0;
};

struct GapAudit {
    std::vector<GapCount> gaps;
    int below_spectrum = 0; // eigenvalues deeper than margin below the first band

    [[nodiscard]] int max_count() const noexcept {
        int m = 0;
        for (const auto& g : gaps)
            m = std::max(m, g.count);
        return m;
    }
};

/// Per gap, the number of eigenvalues lying deeper than `margin` inside it.
[[nodiscard]] inline GapAudit gap_audit(const std::vector<double>& eigs, const BandStructure& bands,
                                        double margin) {
    if (!(margin > 0.0))
        throw DomainError("audit margin must be positive");
    GapAudit out;
    for (std::size_t i = 0; i < bands.gaps.size(); ++i) {
        const Gap& g = bands.gaps[i];
        GapCount c{static_cast<int>(i), g.lower, g.upper, 0};
        for (double e : eigs)
            if (e > g.lower + margin && e < g.upper - margin)
                ++c.count;
        out.gaps.push_back(c);
    }
    if (!bands.bands.empty())
        for (double e : eigs)
            if (e < bands.bands.front().lower - margin)
                ++out.below_spectrum;
    return out;
}

struct Containment {
    int total = 0;
    int within = 0;

    [[nodiscard]] double fraction() const noexcept {
        return total == 0 ? 1.0 : static_cast<double>(within) / total;
    }
};

/// How many of `eigs` lie within `tolerance` of the bands.
[[nodiscard]] inline Containment band_containment(const std::vector<double>& eigs,
                                                  const BandStructure& bands, double tolerance) {
    Containment c;
    for (double e : eigs) {
        ++c.total;
        if (bands.distance_to_bands(e) <= tolerance)
            ++c.within;
    }
    return c;
}

} // namespace cusp
