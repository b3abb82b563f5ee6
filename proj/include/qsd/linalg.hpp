#pragma once

// Dense complex linear algebra for the small Hilbert spaces (dim <= 8) the
// discrimination schemes live on. Everything is value-in/value-out.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qsd {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

namespace tol {
inline constexpr double herm = 1e-9;
inline constexpr double psd = 1e-9;
inline constexpr double eig = 1e-10;
// Residual below which a vector is treated as linearly dependent during
// orthonormal extension.
inline constexpr double dependent = 1e-8;
} // namespace tol

/// Row-major dense complex matrix.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols);
    CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
    CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static CMatrix identity(std::size_t n);
    static CMatrix diagonal(std::span<const double> values);
    /// |a><b|
    static CMatrix outer(std::span<const Complex> a, std::span<const Complex> b);
    static CMatrix projector(std::span<const Complex> v) { return outer(v, v); }
    /// Basis projector |i><i| on C^n.
    static CMatrix basis_projector(std::size_t n, std::size_t i);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }
    std::span<const Complex> entries() const noexcept { return data_; }

    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    CMatrix adjoint() const;
    Complex trace() const;
    CVector column(std::size_t c) const;
    CVector apply(std::span<const Complex> v) const;

    CMatrix& operator+=(const CMatrix& rhs);
    CMatrix& operator-=(const CMatrix& rhs);
    CMatrix& operator*=(Complex s);

    friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
    friend CMatrix operator*(CMatrix a, Complex s) { return a *= s; }
    friend CMatrix operator*(Complex s, CMatrix a) { return a *= s; }
    friend CMatrix operator*(const CMatrix& a, const CMatrix& b);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

double frobenius_norm(const CMatrix& m);
/// max |m_ij|
double max_abs(const CMatrix& m);
/// ||m - m^dagger||_F
double hermiticity_residual(const CMatrix& m);
/// ||U^dagger U - I||_F
double unitarity_residual(const CMatrix& u);

/// <a|b> = sum conj(a_k) b_k
Complex inner(std::span<const Complex> a, std::span<const Complex> b);
double norm(std::span<const Complex> v);

/// Principal square root of a real number: sqrt(x) for x >= 0, i*sqrt(-x)
/// otherwise. Avoids the signed-zero branch ambiguity of std::sqrt(complex).
Complex principal_sqrt(double x);

CMatrix kron(const CMatrix& a, const CMatrix& b);
CVector kron(std::span<const Complex> a, std::span<const Complex> b);

CMatrix commutator(const CMatrix& a, const CMatrix& b);

struct EigenDecomposition {
    std::vector<double> values; // ascending
    CMatrix vectors;            // unitary, column k pairs with values[k]
};

/// Cyclic complex Jacobi diagonalization. Throws NotHermitian when
/// ||h - h^dagger||_F exceeds tol::herm.
EigenDecomposition hermitian_eig(const CMatrix& h);

/// Factor L with L L^dagger = g. Full-rank inputs give the usual
/// lower-triangular factor with positive real diagonal; rank-deficient inputs
/// zero the dependent columns, falling back to V sqrt(Lambda) V^dagger when
/// the triangular attempt loses accuracy.
CMatrix psd_cholesky(const CMatrix& g);

/// Hermitian PSD square root s with s*s = m.
CMatrix principal_sqrt(const CMatrix& m);

/// Unitary U on C^dim with U d_k = i_k for every pair. The Gram matrices of
/// both lists must agree; the orthogonal complements are completed by
/// extending with canonical basis vectors in index order.
CMatrix isometry_completion(std::span<const CVector> domain, std::span<const CVector> image,
                            std::size_t dim);

} // namespace qsd
