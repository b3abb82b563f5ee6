#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qsd/analysis.hpp"
#include "qsd/error.hpp"
#include "qsd/schemes.hpp"

using namespace qsd;

namespace {
std::vector<double> priors(double a, double b, double c) { return {a, b, c}; }
} // namespace

TEST_CASE("proof-family optimum") {
    auto o = optimize_unambiguous_special(0.5, priors(0.3, 0.3, 0.4));
    CHECK(o.x0 == doctest::Approx(0.5 * std::sqrt(0.4 / 0.3)).epsilon(1e-12));
    CHECK(o.x1 == doctest::Approx(o.x0));
    CHECK(o.value == doctest::Approx(0.3072).epsilon(1e-4));
    CHECK(o.value == doctest::Approx(oracle::family_success(0.5, o.x0, o.x1, {0.3, 0.3, 0.4})));

    o = optimize_unambiguous_special(0.5, priors(0.1, 0.1, 0.8));
    CHECK(o.x0 == doctest::Approx(1.0));
    CHECK(o.x1 == doctest::Approx(1.0));
    CHECK(o.value == doctest::Approx(0.4));

    CHECK(optimize_unambiguous_special(0.0, priors(0.3, 0.3, 0.4)).value == doctest::Approx(1.0));
    CHECK(optimize_unambiguous_special(1e-4, priors(0.3, 0.3, 0.4)).value == doctest::Approx(1.0).epsilon(1e-3));
    CHECK_THROWS_AS(optimize_unambiguous_special(0.8, priors(0.3, 0.3, 0.4)), Error);
}

TEST_CASE("proof-family optimum matches grid search and stays under the bound") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> ug(0.01, std::sqrt(0.5));
    for (int trial = 0; trial < 60; ++trial) {
        const double g = ug(rng);
        const auto p = oracle::random_priors(rng);
        const auto closed = optimize_unambiguous_special(g, p);
        const auto grid = grid_optimize_unambiguous_special(g, p);
        CHECK(closed.value >= grid.value - 1e-5);
        CHECK(closed.value <= grid.value + 1e-2);
        const double g2 = g * g;
        // feasibility of the returned point
        CHECK(closed.x0 >= g2 - 1e-12);
        CHECK(closed.x1 <= 1.0 + 1e-12);
        CHECK(g2 * (1.0 / closed.x0 + 1.0 / closed.x1) <= 1.0 + 1e-12);
        if (p[2] < 1.0 - 1e-9) {
            CHECK(closed.value <= 1.0 - g2 * (1.0 + p[2]) - 1e-12);
        }
    }
}

TEST_CASE("symmetric-overlap grid optimizer reproduces the piecewise formula") {
    for (const auto& [g, p] : std::vector<std::pair<double, std::array<double, 3>>>{
             {0.3, {0.2, 0.3, 0.5}}, {0.2, {0.05, 0.05, 0.9}}, {0.6, {0.1, 0.2, 0.7}}, {0.4, {0.25, 0.25, 0.5}}}) {
        const auto grid = grid_optimize_symmetric_unambiguous(g, p);
        CHECK(std::abs(grid.value - oracle::xu_piecewise(g, p).value) <= 1e-3);
    }
}

TEST_CASE("mixed versus proof family") {
    auto r = theorem21_check(0.5, priors(0.3, 0.3, 0.4));
    CHECK(r.p_mixed == doctest::Approx(0.7));
    REQUIRE(r.theorem_bound.has_value());
    CHECK(*r.theorem_bound == doctest::Approx(0.65));
    CHECK(r.p_una_reference == doctest::Approx(0.3072).epsilon(1e-4));
    CHECK(r.reference_kind == ReferenceKind::FamilyOptimum);
    CHECK(r.verdict);
    CHECK(r.hypothesis_holds);

    r = theorem21_check(0.1, priors(0.05, 0.05, 0.9));
    CHECK(r.p_mixed == doctest::Approx(0.998));
    CHECK(r.margin > 0.0);

    r = theorem21_check(0.4, priors(1.0 / 3, 1.0 / 3, 1.0 / 3));
    CHECK(r.p_mixed == doctest::Approx(*r.theorem_bound));
    CHECK(r.p_una_reference < *r.theorem_bound);

    r = theorem21_check(0.3, priors(0.45, 0.45, 0.1));
    CHECK_FALSE(r.hypothesis_holds);

    CHECK_THROWS_AS(theorem21_check(0.0, priors(0.3, 0.3, 0.4)), Error);
    CHECK_THROWS_AS(theorem21_check(0.8, priors(0.3, 0.3, 0.4)), Error);
}

TEST_CASE("equal-overlap mixed versus piecewise optimum") {
    auto r = theorem31_check(0.2, priors(0.05, 0.05, 0.9));
    CHECK(r.p_mixed == doctest::Approx(0.98));
    CHECK(r.p_una_reference == doctest::Approx(0.8503).epsilon(1e-4));
    CHECK(r.xu_case == "4");
    CHECK(r.reference_kind == ReferenceKind::XuMax);
    CHECK(r.verdict);

    r = theorem31_check(0.0, priors(0.2, 0.3, 0.5));
    CHECK(r.p_mixed == doctest::Approx(1.0));
    CHECK(r.margin == doctest::Approx(0.0));
    CHECK(r.verdict);

    r = theorem31_check(0.3, priors(1.0 / 3, 1.0 / 3, 1.0 / 3));
    CHECK(r.p_mixed == doctest::Approx(0.8));
    CHECK(r.p_una_reference == doctest::Approx(0.7));
    CHECK(r.verdict);

    r = theorem31_check(0.2, priors(0.9, 0.05, 0.05));
    CHECK(r.priors == std::array<double, 3>{0.05, 0.05, 0.9});
    CHECK(r.permutation[2] == 0);
    CHECK(r.p_mixed == doctest::Approx(0.98));
}

TEST_CASE("left classicality") {
    CHECK(left_classicality_check(CMatrix::diagonal(std::vector<double>{0.2, 0.3, 0.5}),
                                  CMatrix::basis_projector(3, 1))
              .classical);
    const auto form = oracle::product_form(0.5, 0.0, 0.4);
    CHECK(left_classicality_check(form.system, CMatrix::basis_projector(3, 1)).classical);
    CMatrix off = CMatrix::diagonal(std::vector<double>{0.5, 0.5, 0.0});
    off(0, 1) = 0.2;
    off(1, 0) = 0.2;
    const auto r = left_classicality_check(off, CMatrix::basis_projector(3, 1));
    CHECK_FALSE(r.classical);
    CHECK(r.residual > 0.1);
}

TEST_CASE("right classicality") {
    const CMatrix a{{0.6, Complex{0.1, 0.2}}, {Complex{0.1, -0.2}, 0.4}};
    const CMatrix b = CMatrix::diagonal(std::vector<double>{0.3, 0.7});
    CHECK(right_classicality_check(DensityMatrix(kron(a, b)), 2, 2).classical);

    const auto boundary = build_mixed_special(std::sqrt(0.5), priors(0.3, 0.3, 0.4));
    CHECK(right_classicality_check(boundary.coupled_density(), 3, 2).classical);

    const auto inside = build_mixed_special(0.5, priors(0.3, 0.3, 0.4));
    const auto r = right_classicality_check(inside.coupled_density(), 3, 2);
    CHECK_FALSE(r.classical);
    CHECK(r.residual > 1e-3);
}
