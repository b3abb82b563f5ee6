#include "qsd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qsd/error.hpp"

namespace qsd {

namespace {

void require_square(const CMatrix& m, const char* what) {
    if (!m.is_square()) {
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(what) + " requires a square matrix, got " + std::to_string(m.rows()) +
                        "x" + std::to_string(m.cols()));
    }
}

void require_hermitian(const CMatrix& m, const char* what) {
    require_square(m, what);
    const double r = hermiticity_residual(m);
    if (r > tol::herm) {
        throw Error(ErrorCode::NotHermitian,
                    std::string(what) + ": ||h - h^dagger||_F = " + std::to_string(r));
    }
}

void require_psd(const EigenDecomposition& eig, const char* what) {
    if (!eig.values.empty() && eig.values.front() < -tol::psd) {
        throw Error(ErrorCode::NotPsd,
                    std::string(what) + ": smallest eigenvalue " + std::to_string(eig.values.front()));
    }
}

// Subtract from `r` its projections onto the orthonormal set `basis`, twice,
// mirroring the same coefficients onto `mirror` when given.
void orthogonalize(CVector& r, const std::vector<CVector>& basis, CVector* mirror = nullptr,
                   const std::vector<CVector>* mirror_basis = nullptr) {
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < basis.size(); ++j) {
            const Complex coef = inner(basis[j], r);
            for (std::size_t k = 0; k < r.size(); ++k) {
                r[k] -= coef * basis[j][k];
            }
            if (mirror != nullptr) {
                for (std::size_t k = 0; k < mirror->size(); ++k) {
                    (*mirror)[k] -= coef * (*mirror_basis)[j][k];
                }
            }
        }
    }
}

void scale(CVector& v, double s) {
    for (auto& x : v) {
        x *= s;
    }
}

void extend_to_basis(std::vector<CVector>& basis, std::size_t dim) {
    for (std::size_t i = 0; i < dim && basis.size() < dim; ++i) {
        CVector r(dim, Complex{0.0, 0.0});
        r[i] = 1.0;
        orthogonalize(r, basis);
        const double nr = norm(r);
        if (nr < tol::dependent) {
            continue;
        }
        scale(r, 1.0 / nr);
        basis.push_back(std::move(r));
    }
}

} // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex{0.0, 0.0}) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
        throw Error(ErrorCode::DimensionMismatch, "entry count does not match rows x cols");
    }
    for (const auto& z : data_) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw Error(ErrorCode::InvalidArgument, "matrix entries must be finite");
        }
    }
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        if (row.size() != cols_) {
            throw Error(ErrorCode::DimensionMismatch, "ragged matrix literal");
        }
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

CMatrix CMatrix::diagonal(std::span<const double> values) {
    CMatrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        m(i, i) = values[i];
    }
    return m;
}

CMatrix CMatrix::outer(std::span<const Complex> a, std::span<const Complex> b) {
    CMatrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            m(i, j) = a[i] * std::conj(b[j]);
        }
    }
    return m;
}

CMatrix CMatrix::basis_projector(std::size_t n, std::size_t i) {
    if (i >= n) {
        throw Error(ErrorCode::IndexOutOfRange, "basis index " + std::to_string(i));
    }
    CMatrix m(n, n);
    m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::adjoint() const {
    CMatrix m(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            m(c, r) = std::conj((*this)(r, c));
        }
    }
    return m;
}

Complex CMatrix::trace() const {
    Complex t{0.0, 0.0};
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) {
        t += (*this)(i, i);
    }
    return t;
}

CVector CMatrix::column(std::size_t c) const {
    CVector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        v[r] = (*this)(r, c);
    }
    return v;
}

CVector CMatrix::apply(std::span<const Complex> v) const {
    if (v.size() != cols_) {
        throw Error(ErrorCode::DimensionMismatch, "matrix-vector size mismatch");
    }
    CVector out(rows_, Complex{0.0, 0.0});
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            out[r] += (*this)(r, c) * v[c];
        }
    }
    return out;
}

CMatrix& CMatrix::operator+=(const CMatrix& rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) {
        throw Error(ErrorCode::DimensionMismatch, "matrix sum of unequal shapes");
    }
    for (std::size_t k = 0; k < data_.size(); ++k) {
        data_[k] += rhs.data_[k];
    }
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) {
        throw Error(ErrorCode::DimensionMismatch, "matrix difference of unequal shapes");
    }
    for (std::size_t k = 0; k < data_.size(); ++k) {
        data_[k] -= rhs.data_[k];
    }
    return *this;
}

CMatrix& CMatrix::operator*=(Complex s) {
    for (auto& z : data_) {
        z *= s;
    }
    return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols_ != b.rows_) {
        throw Error(ErrorCode::DimensionMismatch, "matrix product of incompatible shapes");
    }
    CMatrix m(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{0.0, 0.0}) {
                continue;
            }
            for (std::size_t j = 0; j < b.cols_; ++j) {
                m(i, j) += aik * b(k, j);
            }
        }
    }
    return m;
}

double frobenius_norm(const CMatrix& m) {
    double s = 0.0;
    for (const auto& z : m.entries()) {
        s += std::norm(z);
    }
    return std::sqrt(s);
}

double max_abs(const CMatrix& m) {
    double best = 0.0;
    for (const auto& z : m.entries()) {
        best = std::max(best, std::abs(z));
    }
    return best;
}

double hermiticity_residual(const CMatrix& m) {
    if (!m.is_square()) {
        throw Error(ErrorCode::DimensionMismatch, "hermiticity of a non-square matrix");
    }
    return frobenius_norm(m - m.adjoint());
}

double unitarity_residual(const CMatrix& u) {
    return frobenius_norm(u.adjoint() * u - CMatrix::identity(u.cols()));
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::DimensionMismatch, "inner product of unequal lengths");
    }
    Complex s{0.0, 0.0};
    for (std::size_t k = 0; k < a.size(); ++k) {
        s += std::conj(a[k]) * b[k];
    }
    return s;
}

double norm(std::span<const Complex> v) {
    double s = 0.0;
    for (const auto& z : v) {
        s += std::norm(z);
    }
    return std::sqrt(s);
}

Complex principal_sqrt(double x) {
    return x >= 0.0 ? Complex{std::sqrt(x), 0.0} : Complex{0.0, std::sqrt(-x)};
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix m(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const Complex aij = a(i, j);
            for (std::size_t k = 0; k < b.rows(); ++k) {
                for (std::size_t l = 0; l < b.cols(); ++l) {
                    m(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
                }
            }
        }
    }
    return m;
}

CVector kron(std::span<const Complex> a, std::span<const Complex> b) {
    CVector v;
    v.reserve(a.size() * b.size());
    for (const auto& x : a) {
        for (const auto& y : b) {
            v.push_back(x * y);
        }
    }
    return v;
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) {
    if (!a.is_square() || !b.is_square() || a.rows() != b.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "commutator needs equal square matrices");
    }
    return a * b - b * a;
}

EigenDecomposition hermitian_eig(const CMatrix& h) {
    require_hermitian(h, "hermitian_eig");
    const std::size_t n = h.rows();
    CMatrix a = (h + h.adjoint()) * Complex{0.5, 0.0};
    CMatrix v = CMatrix::identity(n);
    const double scale = std::max(frobenius_norm(a), 1e-300);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += std::norm(a(p, q));
            }
        }
        if (std::sqrt(off) <= 1e-17 * scale) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag <= 1e-300) {
                    continue;
                }
                // Phase-rotate the (p,q) block to a real symmetric one, then
                // apply the classical Jacobi rotation.
                const Complex phase_conj = std::conj(apq) / mag;
                const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
                const double c = 1.0 / std::hypot(t, 1.0);
                const double s = t * c;
                const Complex gpp = c;
                const Complex gpq = s;
                const Complex gqp = -s * phase_conj;
                const Complex gqq = c * phase_conj;

                for (std::size_t k = 0; k < n; ++k) {
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = akp * gpp + akq * gqp;
                    a(k, q) = akp * gpq + akq * gqq;
                    const Complex vkp = v(k, p);
                    const Complex vkq = v(k, q);
                    v(k, p) = vkp * gpp + vkq * gqp;
                    v(k, q) = vkp * gpq + vkq * gqq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
                    a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

    EigenDecomposition out{std::vector<double>(n), CMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (std::size_t r = 0; r < n; ++r) {
            out.vectors(r, k) = v(r, order[k]);
        }
    }
    return out;
}

CMatrix psd_cholesky(const CMatrix& g) {
    require_hermitian(g, "psd_cholesky");
    const auto eig = hermitian_eig(g);
    require_psd(eig, "psd_cholesky");

    const std::size_t n = g.rows();
    double diag_scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        diag_scale = std::max(diag_scale, std::abs(g(i, i)));
    }
    const double pivot_floor = 1e-14 * diag_scale;

    CMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = g(j, j).real();
        for (std::size_t k = 0; k < j; ++k) {
            d -= std::norm(l(j, k));
        }
        if (d <= pivot_floor) {
            continue; // dependent column
        }
        const double pivot = std::sqrt(d);
        l(j, j) = pivot;
        for (std::size_t i = j + 1; i < n; ++i) {
            Complex s = g(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                s -= l(i, k) * std::conj(l(j, k));
            }
            l(i, j) = s / pivot;
        }
    }
    if (frobenius_norm(l * l.adjoint() - g) <= tol::eig) {
        return l;
    }

    CMatrix factor(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double root = std::sqrt(std::max(eig.values[k], 0.0));
        for (std::size_t r = 0; r < n; ++r) {
            factor(r, k) = eig.vectors(r, k) * root;
        }
    }
    return factor;
}

CMatrix principal_sqrt(const CMatrix& m) {
    require_hermitian(m, "principal_sqrt");
    const auto eig = hermitian_eig(m);
    require_psd(eig, "principal_sqrt");
    std::vector<double> roots(eig.values.size());
    std::transform(eig.values.begin(), eig.values.end(), roots.begin(),
                   [](double x) { return std::sqrt(std::max(x, 0.0)); });
    const CMatrix s = eig.vectors * CMatrix::diagonal(roots) * eig.vectors.adjoint();
    return (s + s.adjoint()) * Complex{0.5, 0.0};
}

CMatrix isometry_completion(std::span<const CVector> domain, std::span<const CVector> image,
                            std::size_t dim) {
    if (domain.size() != image.size()) {
        throw Error(ErrorCode::DimensionMismatch, "domain and image lists differ in length");
    }
    for (std::size_t k = 0; k < domain.size(); ++k) {
        if (domain[k].size() != dim || image[k].size() != dim) {
            throw Error(ErrorCode::DimensionMismatch,
                        "vector " + std::to_string(k) + " is not of dimension " + std::to_string(dim));
        }
    }
    double gram_diff = 0.0;
    for (std::size_t i = 0; i < domain.size(); ++i) {
        for (std::size_t j = 0; j < domain.size(); ++j) {
            gram_diff += std::norm(inner(domain[i], domain[j]) - inner(image[i], image[j]));
        }
    }
    gram_diff = std::sqrt(gram_diff);
    if (gram_diff > tol::eig) {
        throw Error(ErrorCode::GramMismatch, "||G_domain - G_image||_F = " + std::to_string(gram_diff));
    }

    std::vector<CVector> from;
    std::vector<CVector> to;
    for (std::size_t k = 0; k < domain.size(); ++k) {
        CVector r = domain[k];
        CVector rp = image[k];
        orthogonalize(r, from, &rp, &to);
        const double nr = norm(r);
        if (nr < tol::dependent) {
            continue;
        }
        scale(r, 1.0 / nr);
        // The mirrored residual has the same norm up to the Gram mismatch;
        // re-orthogonalize it on its own side so the result stays unitary.
        orthogonalize(rp, to);
        scale(rp, 1.0 / norm(rp));
        from.push_back(std::move(r));
        to.push_back(std::move(rp));
    }
    extend_to_basis(from, dim);
    extend_to_basis(to, dim);

    CMatrix u(dim, dim);
    for (std::size_t j = 0; j < dim; ++j) {
        u += CMatrix::outer(to[j], from[j]);
    }
    return u;
}

} // namespace qsd
