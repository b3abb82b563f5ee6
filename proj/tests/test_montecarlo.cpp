#include <doctest.h>

#include <chrono>
#include <cmath>

#include "qsd/error.hpp"
#include "qsd/montecarlo.hpp"

using namespace qsd;

namespace {
std::vector<double> priors(double a, double b, double c) { return {a, b, c}; }

Scheme orthonormal_scheme() { return build_zero_aux(0, 0, 0, priors(0.2, 0.3, 0.5)); }
} // namespace

TEST_CASE("counter generator") {
    CounterRng a(7, 0);
    CounterRng b(7, 0);
    CounterRng c(7, 1);
    bool differs = false;
    for (int k = 0; k < 100; ++k) {
        const auto x = a.next();
        CHECK(x == b.next());
        differs = differs || x != c.next();
    }
    CHECK(differs);
    // splitmix64 reference output for state 0 after one increment
    CHECK(CounterRng::splitmix64(0) == 0xE220A8397B1DCDAFULL);
    CounterRng u(1, 2);
    for (int k = 0; k < 1000; ++k) {
        const double v = u.uniform();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("inverse-CDF sampling") {
    const std::vector<double> w{0.25, 0.0, 0.75};
    CHECK(sample_index(w, 0.0) == 0);
    CHECK(sample_index(w, 0.2499) == 0);
    CHECK(sample_index(w, 0.25) == 2);
    CHECK(sample_index(w, 0.999999) == 2);
    const std::vector<double> noisy{-1e-12, 1.0, -1e-12};
    CHECK(sample_index(noisy, 0.0) == 1);
    CHECK(sample_index(noisy, 0.9999999) == 1);
    CHECK_THROWS_AS(sample_index(std::vector<double>{0.0, 0.0}, 0.5), Error);
}

TEST_CASE("brute-force success") {
    CHECK(brute_force_success(orthonormal_scheme()) == doctest::Approx(1.0));
    const auto s = build_mixed_special(0.5, priors(0.3, 0.3, 0.4));
    CHECK(std::abs(brute_force_success(s) - (1.0 - 2.0 * 0.25 * 0.6)) <= 1e-10);

    const auto z = build_zero_aux(0.09, 0.3, 0.3, priors(1.0 / 3, 1.0 / 3, 1.0 / 3));
    CHECK(std::abs(brute_force_success(z) - z.analytic_success) <= 1e-10);
}

TEST_CASE("simulation") {
    SUBCASE("orthonormal scheme never fails") {
        const auto r = simulate(orthonormal_scheme(), 1000, 99);
        CHECK(r.empirical_success == 1.0);
        CHECK(r.std_error == 0.0);
    }
    SUBCASE("counts and statistics") {
        const auto s = build_mixed_special(0.5, priors(0.3, 0.3, 0.4));
        const std::uint64_t n = 200'000;
        const auto r = simulate(s, n, 5);
        std::uint64_t total = 0;
        for (const auto& row : r.counts) {
            for (auto c : row) {
                total += c;
            }
        }
        CHECK(total == n);
        CHECK(r.std_error == doctest::Approx(std::sqrt(r.empirical_success * (1 - r.empirical_success) / n)));
        CHECK(std::abs(r.empirical_success - brute_force_success(s)) <= 5.0 * r.std_error);
        // the third state never lands on the failure outcome
        CHECK(r.counts[2][3] == 0);
    }
    SUBCASE("determinism and shard independence") {
        const auto s = build_mixed_general(0.5, 0.1, priors(0.25, 0.25, 0.5));
        const auto a = simulate(s, 300'001, 17);
        const auto b = simulate(s, 300'001, 17);
        CHECK(a == b);
        const auto c = simulate(s, 300'001, 18);
        CHECK_FALSE(a == c);
    }
    SUBCASE("zero trials") { CHECK_THROWS_AS(simulate(orthonormal_scheme(), 0, 1), Error); }
}

TEST_CASE("grids") {
    const auto g = GridRange::parse("0:0.9:0.05").values();
    CHECK(g.size() == 19);
    CHECK(g.back() == doctest::Approx(0.9));
    CHECK(GridRange::parse("0.5:0.5:0.1").values().size() == 1);
    CHECK_THROWS_AS(GridRange::parse("0:1"), Error);
    CHECK_THROWS_AS(GridRange::parse("0:1:0"), Error);
    CHECK_THROWS_AS(GridRange::parse("1:0:0.1"), Error);

    const auto s = simplex_grid(0.05);
    CHECK(s.size() == 231);
    for (const auto& p : s) {
        CHECK(std::abs(p[0] + p[1] + p[2] - 1.0) <= 1e-12);
    }
    CHECK_THROWS_AS(simplex_grid(0.3), Error);
}

TEST_CASE("sweeps") {
    CHECK(parse_sweep_kind("2.1") == SweepKind::Theorem21);
    CHECK(parse_sweep_kind("theorem31") == SweepKind::Theorem31);
    CHECK_THROWS_AS(parse_sweep_kind("4.2"), Error);

    SUBCASE("single point matches the direct check") {
        const std::vector<double> gammas{0.5};
        const std::vector<std::array<double, 3>> pts{{0.3, 0.3, 0.4}};
        const auto r = sweep(SweepKind::Theorem21, gammas, pts);
        REQUIRE(r.records.size() == 1);
        const auto direct = theorem21_check(0.5, pts[0]);
        CHECK(r.records[0].p_mixed == direct.p_mixed);
        CHECK(r.records[0].p_una_reference == direct.p_una_reference);
    }
    SUBCASE("hypothesis filter") {
        const std::vector<double> gammas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
        const auto pts = simplex_grid(0.05);
        const auto r = sweep(SweepKind::Theorem21, gammas, pts);
        CHECK(!r.records.empty());
        for (const auto& rec : r.records) {
            CHECK(rec.priors[2] >= 1.0 / 3 - 1e-12);
            CHECK(rec.verdict);
        }
        const auto all = sweep(SweepKind::Theorem21, gammas, pts, false);
        CHECK(all.records.size() == gammas.size() * pts.size());
    }
    SUBCASE("equal-overlap sweep") {
        const auto gammas = GridRange::parse("0:0.9:0.05").values();
        const auto r = sweep(SweepKind::Theorem31, gammas, simplex_grid(0.05));
        CHECK(r.skipped == 0);
        for (const auto& rec : r.records) {
            CHECK(rec.margin >= -1e-12);
        }
    }
    SUBCASE("out-of-domain points are counted") {
        const std::vector<double> gammas{0.5, 0.9};
        const std::vector<std::array<double, 3>> pts{{0.3, 0.3, 0.4}};
        const auto r = sweep(SweepKind::Theorem21, gammas, pts);
        CHECK(r.records.size() == 1);
        CHECK(r.skipped == 1);
    }
    SUBCASE("empty grids") {
        const std::vector<double> none;
        CHECK_THROWS_AS(sweep(SweepKind::Theorem31, none, simplex_grid(0.5)), Error);
    }
}
