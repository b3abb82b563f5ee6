#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "qsd/error.hpp"
#include "qsd/linalg.hpp"
#include "qsd/schemes.hpp"

using namespace qsd;

namespace {

CMatrix random_hermitian(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> d;
    CMatrix a(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            a(r, c) = Complex{d(rng), d(rng)};
        }
    }
    return (a + a.adjoint()) * Complex{0.5, 0.0};
}

CMatrix random_psd(std::mt19937_64& rng, std::size_t n, std::size_t rank) {
    std::normal_distribution<double> d;
    CMatrix b(n, rank);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < rank; ++c) {
            b(r, c) = Complex{d(rng), d(rng)};
        }
    }
    return b * b.adjoint();
}

Eigen::MatrixXcd to_eigen(const CMatrix& m) {
    Eigen::MatrixXcd e(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            e(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(r, c);
        }
    }
    return e;
}

CMatrix diag_of(const std::vector<double>& v) { return CMatrix::diagonal(v); }

} // namespace

TEST_CASE("kron of identities and projectors") {
    CHECK(max_abs(kron(CMatrix::identity(2), CMatrix::identity(3)) - CMatrix::identity(6)) == 0.0);
    const CMatrix p = CMatrix::basis_projector(2, 0);
    CHECK(max_abs(kron(p, p) - CMatrix::basis_projector(4, 0)) == 0.0);
    const CMatrix x{{0, 1}, {1, 0}};
    const CMatrix xx = kron(x, x);
    CHECK(max_abs(xx * xx - CMatrix::identity(4)) == 0.0);
}

TEST_CASE("kron of vectors follows system-major ordering") {
    const CVector a{0, 0, 1};
    const CVector b{1, 0};
    const CVector v = kron(a, b);
    REQUIRE(v.size() == 6);
    CHECK(v[4] == Complex{1, 0});
}

TEST_CASE("hermitian_eig on small fixed inputs") {
    auto e = hermitian_eig(CMatrix::diagonal(std::vector<double>{2, 1}));
    CHECK(e.values[0] == doctest::Approx(1.0));
    CHECK(e.values[1] == doctest::Approx(2.0));
    CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(1.0));

    e = hermitian_eig(CMatrix{{0, 1}, {1, 0}});
    CHECK(e.values[0] == doctest::Approx(-1.0));
    CHECK(e.values[1] == doctest::Approx(1.0));

    CHECK_THROWS_AS(hermitian_eig(CMatrix{{0, 1}, {0, 0}}), Error);
}

TEST_CASE("hermitian_eig agrees with Eigen and reconstructs") {
    std::mt19937_64 rng(11);
    for (std::size_t n = 1; n <= 8; ++n) {
        for (int trial = 0; trial < 20; ++trial) {
            const CMatrix h = random_hermitian(rng, n);
            const auto e = hermitian_eig(h);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ref(to_eigen(h));
            for (std::size_t k = 0; k < n; ++k) {
                CHECK(std::abs(e.values[k] - ref.eigenvalues()(static_cast<Eigen::Index>(k))) < 1e-10);
            }
            CHECK(frobenius_norm(e.vectors * diag_of(e.values) * e.vectors.adjoint() - h) <= 1e-10);
            CHECK(unitarity_residual(e.vectors) <= 1e-10);
        }
    }
}

TEST_CASE("spectrum of the coupled mixed state is a probability vector") {
    const auto s = build_mixed_special(0.5, std::vector<double>{0.3, 0.3, 0.4});
    const auto e = hermitian_eig(s.coupled_density().matrix());
    double sum = 0.0;
    for (double v : e.values) {
        CHECK(v >= -1e-12);
        sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("psd_cholesky") {
    CHECK(max_abs(psd_cholesky(CMatrix::identity(3)) - CMatrix::identity(3)) <= 1e-15);

    const double g = 0.5;
    const CMatrix gram{{1, 0, g}, {0, 1, g}, {g, g, 1}};
    const CMatrix l = psd_cholesky(gram);
    CHECK(frobenius_norm(l * l.adjoint() - gram) <= 1e-12);

    const CMatrix l1 = psd_cholesky(CMatrix{{1, 1}, {1, 1}});
    CHECK(frobenius_norm(l1 * l1.adjoint() - CMatrix{{1, 1}, {1, 1}}) <= 1e-12);
    CHECK(std::abs(l1(0, 1)) + std::abs(l1(1, 1)) <= 1e-12); // rank one

    CHECK_THROWS_AS(psd_cholesky(CMatrix{{1, 0, 0.8}, {0, 1, 0.8}, {0.8, 0.8, 1}}), Error);
}

TEST_CASE("psd_cholesky on random inputs, full and deficient rank") {
    std::mt19937_64 rng(12);
    for (std::size_t n = 1; n <= 8; ++n) {
        for (std::size_t rank = 1; rank <= n; ++rank) {
            const CMatrix g = random_psd(rng, n, rank);
            const CMatrix l = psd_cholesky(g);
            CHECK(frobenius_norm(l * l.adjoint() - g) <= 1e-10 * std::max(1.0, frobenius_norm(g)));
        }
    }
}

TEST_CASE("matrix principal square root") {
    const CMatrix s = principal_sqrt(CMatrix::diagonal(std::vector<double>{4, 1}));
    CHECK(max_abs(s - CMatrix::diagonal(std::vector<double>{2, 1})) <= 1e-12);
    const CMatrix p = Ket::plus(3).projector();
    CHECK(max_abs(principal_sqrt(p) - p) <= 1e-12);

    const auto scheme = build_mixed_special(0.5, std::vector<double>{0.3, 0.3, 0.4});
    const CMatrix fail = scheme.povm.element(*scheme.povm.inconclusive_outcome());
    CHECK(max_abs(principal_sqrt(fail) - fail) <= 1e-12);

    std::mt19937_64 rng(13);
    for (std::size_t n = 1; n <= 8; ++n) {
        const CMatrix m = random_psd(rng, n, n);
        const CMatrix r = principal_sqrt(m);
        CHECK(frobenius_norm(r * r - m) <= 1e-10 * std::max(1.0, frobenius_norm(m)));
        for (double v : hermitian_eig(r).values) {
            CHECK(v >= -1e-10);
        }
    }
}

TEST_CASE("scalar principal square root branch") {
    CHECK(principal_sqrt(4.0) == Complex{2, 0});
    const Complex z = principal_sqrt(-0.25);
    CHECK(z.real() == 0.0);
    CHECK(z.imag() == doctest::Approx(0.5));
    CHECK(std::abs(z * z - Complex{-0.25, 0}) < 1e-15);
    CHECK(principal_sqrt(-0.0) == Complex{0, 0});
}

TEST_CASE("isometry_completion") {
    SUBCASE("full basis onto itself") {
        std::vector<CVector> basis;
        for (std::size_t k = 0; k < 3; ++k) {
            basis.push_back(Ket::basis(3, k).amplitudes());
        }
        CHECK(max_abs(isometry_completion(basis, basis, 3) - CMatrix::identity(3)) <= 1e-14);
    }
    SUBCASE("single vector") {
        const std::vector<CVector> d{{1, 0}};
        const std::vector<CVector> i{{0, 1}};
        const CMatrix u = isometry_completion(d, i, 2);
        CHECK(unitarity_residual(u) <= 1e-12);
        const CVector out = u.apply(d[0]);
        CHECK(std::abs(out[1] - Complex{1, 0}) <= 1e-12);
    }
    SUBCASE("mismatched overlaps are rejected") {
        const std::vector<CVector> d{{1, 0}, {0, 1}};
        const std::vector<CVector> i{{1, 0}, {1, 0}};
        CHECK_THROWS_AS(isometry_completion(d, i, 2), Error);
    }
    SUBCASE("random pairs with prescribed overlaps") {
        std::mt19937_64 rng(14);
        std::normal_distribution<double> nd;
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t dim = 6;
            // a random unitary from the eigenvectors of a random Hermitian
            const CMatrix w = hermitian_eig(random_hermitian(rng, dim)).vectors;
            std::vector<CVector> d;
            std::vector<CVector> im;
            for (int k = 0; k < 3; ++k) {
                CVector v(dim);
                for (auto& z : v) {
                    z = Complex{nd(rng), nd(rng)};
                }
                const double n = norm(v);
                for (auto& z : v) {
                    z /= n;
                }
                d.push_back(v);
                im.push_back(w.apply(v));
            }
            const CMatrix u = isometry_completion(d, im, dim);
            CHECK(unitarity_residual(u) <= 1e-10);
            for (int k = 0; k < 3; ++k) {
                const CVector got = u.apply(d[k]);
                double err = 0.0;
                for (std::size_t j = 0; j < dim; ++j) {
                    err = std::max(err, std::abs(got[j] - im[k][j]));
                }
                CHECK(err <= 1e-10);
            }
        }
    }
}

TEST_CASE("commutator") {
    const CMatrix a{{1, 2}, {3, 4}};
    CHECK(max_abs(commutator(CMatrix::identity(2), a)) == 0.0);
    CHECK(max_abs(commutator(CMatrix::diagonal(std::vector<double>{1, 2}),
                             CMatrix::diagonal(std::vector<double>{3, 4}))) == 0.0);

    const auto form = oracle::product_form(0.4, 0.0, 0.4);
    CHECK(frobenius_norm(commutator(form.system, CMatrix::basis_projector(3, 1))) <= 1e-12);
}
