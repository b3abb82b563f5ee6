#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "qsd/analysis.hpp"
#include "qsd/montecarlo.hpp"
#include "sampling.hpp"

using namespace qsd;

TEST_CASE("every builder: unitary coupling, complete POVM, pipeline equals formula") {
    std::mt19937_64 rng(61);
    for (const auto& id : sampling::builders()) {
        CAPTURE(id);
        for (int trial = 0; trial < 100; ++trial) {
            const Scheme s = sampling::random_scheme(rng, id);
            CHECK(unitarity_residual(s.coupling) <= 1e-10);
            CHECK(s.povm.completeness_residual() <= 1e-9);
            CHECK(s.analytic_success >= 0.0);
            CHECK(s.analytic_success <= 1.0);
            CHECK(std::abs(brute_force_success(s) - s.analytic_success) <= 1e-9);
            CHECK(sampling::promised_zero_violation(s) <= 1e-10);
        }
    }
}

TEST_CASE("mixed schemes match the amplitude-row oracle") {
    std::mt19937_64 rng(62);
    for (int trial = 0; trial < 200; ++trial) {
        const Scheme s = sampling::random_scheme(rng, trial % 2 ? "mixed-special" : "mixed-general");
        double g = 0.0;
        double a = 0.0;
        if (const auto* p = std::get_if<MixedSpecialParams>(&s.params)) {
            g = p->gamma;
        } else {
            const auto& q = std::get<MixedGeneralParams>(s.params);
            g = q.gamma;
            a = q.alpha;
        }
        const auto rows = oracle::mixed_rows(g, a);
        const auto table = confusion_matrix(s.coupled_ensemble(), s.povm);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t x = 0; x < 4; ++x) {
                CHECK(std::abs(table[i][x] - rows[i][x]) <= 1e-10);
            }
        }
        const std::array<double, 3> p{s.ensemble.priors[0], s.ensemble.priors[1], s.ensemble.priors[2]};
        CHECK(std::abs(s.analytic_success - oracle::mixed_success(g, a, p)) <= 1e-12);
    }
}

TEST_CASE("decomposition identity and left classicality for equal priors") {
    std::mt19937_64 rng(63);
    for (int trial = 0; trial < 100; ++trial) {
        const double p2 = sampling::uniform(rng, 0.0, 1.0);
        const std::vector<double> p{(1 - p2) / 2, (1 - p2) / 2, p2};
        const double g = sampling::uniform(rng, 0.02, std::sqrt(0.5));
        const bool general = trial % 2 == 1;
        const double a = general ? sampling::uniform(rng, std::max(-1.0, 2 * g * g - 1) + 1e-6, g * g - 1e-6) : 0.0;
        if (general && std::abs(a) < 1e-6) {
            continue;
        }
        const Scheme s = general ? build_mixed_general(g, a, p) : build_mixed_special(g, p);
        const auto d = separable_decomposition(s);
        CHECK(d.reconstruction_residual <= 1e-10);
        CHECK(left_classicality_check(d.part_system, CMatrix::basis_projector(3, 1)).classical);
        CHECK(frobenius_norm(commutator(d.part_system, CMatrix::basis_projector(3, 1))) <= 1e-12);
        const auto want = oracle::product_form(g, a, p2);
        CHECK(std::abs(d.weight - want.weight) <= 1e-12);
        CHECK(oracle::max_entry_diff(d.part_system, want.system) <= 1e-12);
    }
}

TEST_CASE("right classicality fails strictly inside the domain") {
    std::mt19937_64 rng(64);
    for (int trial = 0; trial < 40; ++trial) {
        const double g = sampling::uniform(rng, 0.02, std::sqrt(0.5) - 0.02);
        const Scheme s = build_mixed_special(g, std::vector<double>{0.3, 0.3, 0.4});
        CHECK_FALSE(right_classicality_check(s.coupled_density(), 3, 2).classical);
    }
}

TEST_CASE("simulation stays within five standard errors") {
    std::mt19937_64 rng(65);
    for (const auto& id : sampling::builders()) {
        const Scheme s = sampling::random_scheme(rng, id);
        const auto r = simulate(s, 200'000, 1234);
        const double exact = brute_force_success(s);
        const double se = std::sqrt(exact * (1 - exact) / 200'000.0);
        CAPTURE(id);
        CHECK(std::abs(r.empirical_success - exact) <= 5 * se + 1e-12);
    }
}
