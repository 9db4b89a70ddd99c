#include "cusp/cusp.hpp"
#include "hill_oracle.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace cusp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = std::numbers::pi;

PeriodicPotential reference_tail(double delta = 0.1) {
    const auto V = vp_from_periodic(cutoff_tail_slope(delta, 0.0), 0.0);
    return std::get<PeriodicTail>(V.tail()).potential;
}

PeriodicPotential mathieu(double a, double T) {
    return PeriodicPotential(T, [a, T](double s) { return a * std::cos(2.0 * pi * s / T); });
}

// Oracle gaps wider than `min_width`, from the sorted Hill edges
std::vector<std::pair<double, double>> oracle_gaps(const std::vector<double>& e, double min_width) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 1; i + 1 < e.size(); i += 2)
        if (e[i + 1] - e[i] > min_width)
            out.emplace_back(e[i], e[i + 1]);
    return out;
}

void check_against_hill(const PeriodicPotential& q, double lambda_max, double resolution) {
    const auto bs = band_structure(q, lambda_max, resolution);
    const auto edges = oracle::hill_edges(q.evaluator(), q.period(), lambda_max + 5.0);
    REQUIRE(!bs.bands.empty());
    CHECK_THAT(bs.bands.front().lower, WithinAbs(edges.front(), 1e-8));
    auto gaps = oracle_gaps(edges, 1e-3);
    std::erase_if(gaps, [&](const auto& g) { return g.second >= lambda_max; });
    std::vector<Gap> found;
    for (const auto& g : bs.gaps)
        if (g.width() > 1e-3)
            found.push_back(g);
    REQUIRE(found.size() == gaps.size());
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        INFO("gap " << i);
        CHECK_THAT(found[i].lower, WithinAbs(gaps[i].first, 1e-8));
        CHECK_THAT(found[i].upper, WithinAbs(gaps[i].second, 1e-8));
    }
}

void check_alternation(const BandStructure& bs) {
    REQUIRE(!bs.bands.empty());
    CHECK(bs.bands.front().lower_kind == EdgeKind::Plus2);
    for (std::size_t i = 0; i < bs.bands.size(); ++i) {
        const auto& b = bs.bands[i];
        CHECK(b.lower < b.upper);
        if (b.upper_kind != EdgeKind::Cap)
            CHECK(b.lower_kind != b.upper_kind);
        else
            CHECK(i + 1 == bs.bands.size());
        if (i + 1 < bs.bands.size()) {
            CHECK(b.upper_kind == bs.bands[i + 1].lower_kind);
            CHECK(b.upper < bs.bands[i + 1].lower);
        }
    }
    REQUIRE(bs.gaps.size() + 1 == bs.bands.size());
    for (std::size_t i = 0; i < bs.gaps.size(); ++i) {
        CHECK(bs.gaps[i].lower == bs.bands[i].upper);
        CHECK(bs.gaps[i].upper == bs.bands[i + 1].lower);
    }
}

} // namespace

TEST_CASE("monodromy examples", "[floquet]") {
    const auto zero = PeriodicPotential::constant(0.0, 1.0);
    const auto m0 = monodromy(zero, 0.0);
    CHECK_THAT(m0.m11, WithinAbs(1.0, 1e-12));
    CHECK_THAT(m0.m12, WithinAbs(1.0, 1e-12));
    CHECK_THAT(m0.m21, WithinAbs(0.0, 1e-12));
    CHECK_THAT(m0.m22, WithinAbs(1.0, 1e-12));
    CHECK(m0.integrator_tol == 1e-12);

    const auto mpi = monodromy(zero, pi * pi);
    CHECK_THAT(mpi.m11, WithinAbs(-1.0, 1e-8));
    CHECK_THAT(mpi.m12, WithinAbs(0.0, 1e-8));
    CHECK_THAT(mpi.m21, WithinAbs(0.0, 1e-8));
    CHECK_THAT(mpi.m22, WithinAbs(-1.0, 1e-8));

    for (double c : {0.25, 2.0, 7.5})
        for (double lambda : {-3.0, 0.0, c - 0.1})
            for (double T : {1.0, 3.0}) {
                const auto m = monodromy(PeriodicPotential::constant(c, T), lambda);
                const double k = std::sqrt(c - lambda);
                CHECK_THAT(m.m11, WithinRel(std::cosh(k * T), 1e-10));
                CHECK_THAT(m.m12, WithinRel(std::sinh(k * T) / k, 1e-10));
                CHECK_THAT(m.m21, WithinRel(k * std::sinh(k * T), 1e-10));
            }
    CHECK_THROWS_AS(monodromy(zero, 1.0, 0.0), DomainError);
}

TEST_CASE("discriminant examples", "[floquet]") {
    for (double T : {1.0, 2.0, 3.0})
        for (double lambda : {0.0, 0.3, 4.0, 17.0, 55.5})
            CHECK_THAT(discriminant(PeriodicPotential::constant(0.0, T), lambda),
                       WithinAbs(2.0 * std::cos(std::sqrt(lambda) * T), 1e-10));
    CHECK_THAT(discriminant(PeriodicPotential::constant(0.25, 1.0), 0.25), WithinAbs(2.0, 1e-12));
}

TEST_CASE("determinant and tolerance convergence on the scan grid", "[floquet][property]") {
    const auto q = reference_tail();
    const auto grid = scan_grid(q, 60.0, 1e-2);
    const auto m12 = monodromy_scan(q, grid, 1e-12);
    const auto m13 = monodromy_scan(q, grid, 1e-13);
    double det = 0.0;
    double diff = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        det = std::max(det, std::abs(m12[k].det() - 1.0));
        diff = std::max(diff, std::abs(m12[k].trace() - m13[k].trace()));
    }
    INFO("max |det - 1| = " << det << ", max |Delta(tol) - Delta(tol/10)| = " << diff);
    CHECK(det <= 1e-9);
    CHECK(diff <= 1e-11);
}

TEST_CASE("scan grid", "[floquet]") {
    const auto q = PeriodicPotential::constant(0.25, 3.0);
    const auto g = scan_grid(q, 10.0, 1e-3);
    CHECK(g.front() == -0.75);
    CHECK(g.back() == 10.0);
    CHECK_THAT(g[1] - g[0], WithinAbs(1e-2, 1e-15));
    const auto coarse = scan_grid(q, 10.0, 10.0);
    CHECK_THAT(coarse[1] - coarse[0], WithinAbs(pi * pi / 36.0, 1e-15));
    for (std::size_t k = 1; k < g.size(); ++k)
        CHECK(g[k] > g[k - 1]);
}

TEST_CASE("band structure of constant potentials", "[floquet]") {
    SECTION("free operator has no gaps") {
        for (double T : {1.0, 3.0}) {
            const auto bs = band_structure(PeriodicPotential::constant(0.0, T), 10.0, 1e-3);
            REQUIRE(bs.bands.size() == 1);
            CHECK_THAT(bs.bands[0].lower, WithinAbs(0.0, 1e-8));
            CHECK(bs.bands[0].upper == 10.0);
            CHECK(bs.bands[0].upper_kind == EdgeKind::Cap);
            CHECK(bs.gaps.empty());
        }
    }
    SECTION("quarter") {
        const auto bs = band_structure(PeriodicPotential::constant(0.25, 1.0), 10.0, 1e-3);
        REQUIRE(bs.bands.size() == 1);
        CHECK_THAT(bs.bands[0].lower, WithinAbs(0.25, 1e-8));
        CHECK(bs.bands[0].upper == 10.0);
        CHECK(bs.gaps.empty());
        CHECK(bs.diagnostics.max_det_defect <= 1e-9);
        CHECK(bs.distance_to_bands(0.0) == Catch::Approx(0.25).margin(1e-8));
        CHECK(bs.distance_to_bands(5.0) == 0.0);
    }
}

TEST_CASE("band edges agree with Hill's method", "[floquet][oracle]") {
    SECTION("reference tail potential") { check_against_hill(reference_tail(), 60.0, 1e-3); }
    SECTION("stronger perturbation") { check_against_hill(reference_tail(0.4), 40.0, 1e-3); }
    SECTION("Mathieu") { check_against_hill(mathieu(3.0, 1.5), 60.0, 1e-3); }
}

TEST_CASE("band edge alternation", "[floquet][property]") {
    check_alternation(band_structure(reference_tail(), 60.0, 1e-3));
    check_alternation(band_structure(mathieu(3.0, 1.5), 60.0, 1e-3));
    check_alternation(band_structure(mathieu(-20.0, 1.0), 80.0, 1e-3));
}

TEST_CASE("band structure is invariant under phase shifts", "[floquet][property]") {
    const auto q = reference_tail();
    const double res = 1e-3;
    const auto base = band_structure(q, 60.0, res);
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> pick(0.0, q.period());
    for (int k = 0; k < 3; ++k) {
        const double a = pick(rng);
        INFO("shift " << a);
        const auto bs = band_structure(q.shifted(a), 60.0, res);
        REQUIRE(bs.bands.size() == base.bands.size());
        for (std::size_t i = 0; i < bs.bands.size(); ++i) {
            CHECK_THAT(bs.bands[i].lower, WithinAbs(base.bands[i].lower, res));
            CHECK_THAT(bs.bands[i].upper, WithinAbs(base.bands[i].upper, res));
        }
    }
}

TEST_CASE("raising the cap keeps the bands below the old cap", "[floquet][property]") {
    const auto q = reference_tail();
    const double res = 1e-3;
    const auto low = band_structure(q, 30.0, res);
    const auto high = band_structure(q, 60.0, res);
    REQUIRE(high.bands.size() >= low.bands.size());
    for (std::size_t i = 0; i < low.bands.size(); ++i) {
        CHECK_THAT(high.bands[i].lower, WithinAbs(low.bands[i].lower, res));
        if (low.bands[i].upper_kind != EdgeKind::Cap)
            CHECK_THAT(high.bands[i].upper, WithinAbs(low.bands[i].upper, res));
        else
            CHECK(high.bands[i].upper >= 30.0);
    }
    for (std::size_t i = 0; i < low.gaps.size(); ++i) {
        CHECK_THAT(high.gaps[i].lower, WithinAbs(low.gaps[i].lower, res));
        CHECK_THAT(high.gaps[i].upper, WithinAbs(low.gaps[i].upper, res));
    }
}

TEST_CASE("narrow gaps are reported unresolved", "[floquet]") {
    const double res = 1e-2;
    for (double eps : {5e-4, 2e-3}) {
        const auto q = PeriodicPotential(1.0, [eps](double s) { return eps * std::cos(2.0 * pi * s); });
        const auto bs = band_structure(q, 12.0, res);
        REQUIRE(bs.gaps.size() == 1);
        CHECK_THAT(bs.gaps[0].width(), WithinRel(eps, 0.05));
        CHECK_FALSE(bs.gaps[0].resolved);
    }
    const auto wide = band_structure(mathieu(3.0, 1.0), 12.0, res);
    REQUIRE(!wide.gaps.empty());
    CHECK(wide.gaps[0].resolved);
}

TEST_CASE("threaded scan matches the serial scan", "[floquet]") {
    const auto q = reference_tail();
    FloquetOptions serial;
    FloquetOptions threaded;
    threaded.threads = 4;
    const auto a = band_structure(q, 40.0, 1e-3, serial);
    const auto b = band_structure(q, 40.0, 1e-3, threaded);
    REQUIRE(a.bands.size() == b.bands.size());
    for (std::size_t i = 0; i < a.bands.size(); ++i) {
        CHECK(a.bands[i].lower == b.bands[i].lower);
        CHECK(a.bands[i].upper == b.bands[i].upper);
    }
}

TEST_CASE("band structure errors", "[floquet]") {
    const auto q = PeriodicPotential::constant(1.0, 1.0);
    CHECK_THROWS_AS(band_structure(q, 0.5, 1e-3), DomainError);
    CHECK_THROWS_AS(band_structure(q, 10.0, 0.0), DomainError);
    CHECK_THROWS_AS(PeriodicPotential(0.0, [](double) { return 0.0; }), DomainError);
    CHECK_THROWS_AS(PeriodicPotential(1.0, [](double s) { return s; }), DomainError);
    const SchrodingerPotential bare(0.0, [](double) { return 0.0; }, std::monostate{});
    CHECK_THROWS_AS(essential_spectrum_halfline(bare, 10.0, 1e-3), DomainError);
}

TEST_CASE("essential spectrum of half-line operators", "[floquet]") {
    SECTION("hyperbolic surface") {
        const auto W = potential_from_volume(volume_profile(TorusCuspMetric::hyperbolic(2)));
        const auto bs = essential_spectrum_halfline(W, 20.0, 1e-3);
        REQUIRE(bs.bands.size() == 1);
        CHECK(bs.bands[0].lower == 0.25);
        CHECK(bs.bands[0].upper == 20.0);
        CHECK(bs.bands[0].lower_kind == EdgeKind::Threshold);
    }
    SECTION("higher-dimensional hyperbolic cusps") {
        for (int n : {3, 4}) {
            const auto W = potential_from_volume(volume_profile(TorusCuspMetric::hyperbolic(n)));
            const auto bs = essential_spectrum_halfline(W, 20.0, 1e-3);
            REQUIRE(bs.bands.size() == 1);
            CHECK(bs.bands[0].lower == (n - 1) * (n - 1) / 4.0);
        }
    }
    SECTION("constant tail 9/4") {
        const SchrodingerPotential W(0.0, [](double) { return 2.25; }, ConstantTail{2.25, 0.0});
        const auto bs = essential_spectrum_halfline(W, 20.0, 1e-3);
        REQUIRE(bs.bands.size() == 1);
        CHECK(bs.bands[0].lower == 2.25);
        CHECK(bs.bands[0].upper == 20.0);
    }
    SECTION("cap below the threshold leaves nothing") {
        const auto W = potential_from_volume(volume_profile(TorusCuspMetric::hyperbolic(3)));
        CHECK(essential_spectrum_halfline(W, 0.9, 1e-3).bands.empty());
    }
    SECTION("family dispatches to its tail") {
        const auto W = potential_from_volume(volume_profile(theorem3_family(0.1, 0.0)));
        const auto a = essential_spectrum_halfline(W, 60.0, 1e-3);
        const auto b = band_structure(reference_tail(), 60.0, 1e-3);
        REQUIRE(a.bands.size() == b.bands.size());
        for (std::size_t i = 0; i < a.bands.size(); ++i) {
            CHECK_THAT(a.bands[i].lower, WithinAbs(b.bands[i].lower, 1e-9));
            CHECK_THAT(a.bands[i].upper, WithinAbs(b.bands[i].upper, 1e-9));
        }
    }
}

TEST_CASE("p-form essential spectrum", "[floquet]") {
    SECTION("surface") {
        for (int p : {0, 1, 2}) {
            const auto bs = p_form_essential_spectrum(TorusCuspMetric::hyperbolic(2), p, 20.0, 1e-3);
            REQUIRE(bs.bands.size() == 1);
            CHECK(bs.bands[0].lower == 0.25);
        }
    }
    SECTION("threshold formula") {
        for (int n : {2, 3, 4, 5}) {
            for (int p = 0; p <= n; ++p) {
                const double a = n - 1 - 2 * p;
                const double b = n + 1 - 2 * p;
                double expected = a * a / 4.0;
                if (p >= 1)
                    expected = std::min(expected, b * b / 4.0);
                if (p == n)
                    expected = b * b / 4.0;
                const auto bs =
                    p_form_essential_spectrum(TorusCuspMetric::hyperbolic(n), p, 30.0, 1e-3);
                INFO("n = " << n << ", p = " << p);
                REQUIRE(bs.bands.size() == 1);
                CHECK(bs.bands[0].lower == expected);
            }
        }
    }
    SECTION("n = 3, p = 1 reaches zero") {
        const auto bs = p_form_essential_spectrum(TorusCuspMetric::hyperbolic(3), 1, 10.0, 1e-3);
        REQUIRE(bs.bands.size() == 1);
        CHECK(bs.bands[0].lower == 0.0);
        CHECK(bs.bands[0].upper == 10.0);
    }
}

TEST_CASE("merging band structures", "[floquet]") {
    BandStructure a;
    a.bands = {{1.0, 2.0, EdgeKind::Plus2, EdgeKind::Minus2}, {4.0, 10.0, EdgeKind::Minus2, EdgeKind::Cap}};
    BandStructure b;
    b.bands = {{1.5, 3.0, EdgeKind::Plus2, EdgeKind::Minus2}, {6.0, 7.0, EdgeKind::Plus2, EdgeKind::Minus2}};
    const auto m = merge_band_structures({a, b}, 10.0, 1e-3);
    REQUIRE(m.bands.size() == 2);
    CHECK(m.bands[0].lower == 1.0);
    CHECK(m.bands[0].upper == 3.0);
    CHECK(m.bands[1].lower == 4.0);
    CHECK(m.bands[1].upper == 10.0);
    REQUIRE(m.gaps.size() == 1);
    CHECK(m.gaps[0].lower == 3.0);
    CHECK(m.gaps[0].upper == 4.0);
}
