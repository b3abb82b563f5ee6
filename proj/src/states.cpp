#include "qsd/states.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "qsd/error.hpp"

namespace qsd {

namespace {
constexpr double kKetNormTol = 1e-10;
constexpr double kPriorSumTol = 1e-12;
constexpr double kDensityTol = 1e-9;
} // namespace

Ket::Ket(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.empty()) {
        throw Error(ErrorCode::InvalidArgument, "ket must have positive dimension");
    }
    const double n = norm(amplitudes_);
    if (!std::isfinite(n) || std::abs(n - 1.0) > kKetNormTol) {
        throw Error(ErrorCode::InvalidArgument, "ket norm " + std::to_string(n) + " is not 1");
    }
}

Ket Ket::normalized(CVector amplitudes) {
    const double n = norm(amplitudes);
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw Error(ErrorCode::InvalidArgument, "cannot normalize a zero or non-finite vector");
    }
    for (auto& z : amplitudes) {
        z /= n;
    }
    return Ket(std::move(amplitudes));
}

Ket Ket::basis(std::size_t dim, std::size_t index) {
    if (index >= dim) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "basis index " + std::to_string(index) + " in dimension " + std::to_string(dim));
    }
    CVector v(dim, Complex{0.0, 0.0});
    v[index] = 1.0;
    return Ket(std::move(v));
}

Ket Ket::plus(std::size_t dim) {
    if (dim < 2) {
        throw Error(ErrorCode::DimensionMismatch, "|+> needs dimension >= 2");
    }
    CVector v(dim, Complex{0.0, 0.0});
    v[0] = v[1] = 1.0 / std::sqrt(2.0);
    return Ket(std::move(v));
}

Ket Ket::minus(std::size_t dim) {
    if (dim < 2) {
        throw Error(ErrorCode::DimensionMismatch, "|-> needs dimension >= 2");
    }
    CVector v(dim, Complex{0.0, 0.0});
    v[0] = 1.0 / std::sqrt(2.0);
    v[1] = -1.0 / std::sqrt(2.0);
    return Ket(std::move(v));
}

DensityMatrix::DensityMatrix(CMatrix matrix) : matrix_(std::move(matrix)) {
    if (!matrix_.is_square() || matrix_.rows() == 0) {
        throw Error(ErrorCode::DimensionMismatch, "density matrix must be square and non-empty");
    }
    const double herm = hermiticity_residual(matrix_);
    if (herm > kDensityTol) {
        throw Error(ErrorCode::NotHermitian, "density matrix ||rho - rho^dagger||_F = " + std::to_string(herm));
    }
    const double tr = matrix_.trace().real();
    if (std::abs(tr - 1.0) > kDensityTol) {
        throw Error(ErrorCode::InvalidArgument, "density matrix trace " + std::to_string(tr));
    }
    const auto eig = hermitian_eig(matrix_);
    if (eig.values.front() < -kDensityTol) {
        throw Error(ErrorCode::NotPsd, "density matrix eigenvalue " + std::to_string(eig.values.front()));
    }
}

void validate_priors(std::span<const double> priors) {
    if (priors.empty()) {
        throw Error(ErrorCode::InvalidArgument, "priors must be non-empty");
    }
    for (double p : priors) {
        if (!std::isfinite(p) || p < 0.0) {
            throw Error(ErrorCode::InvalidArgument, "priors must be finite and non-negative");
        }
    }
    const double s = std::accumulate(priors.begin(), priors.end(), 0.0);
    if (std::abs(s - 1.0) > kPriorSumTol) {
        throw Error(ErrorCode::InvalidArgument, "priors sum to " + std::to_string(s) + ", not 1");
    }
}

Ensemble::Ensemble(std::vector<Ket> states_in, std::vector<double> priors_in)
    : states(std::move(states_in)), priors(std::move(priors_in)) {
    if (states.size() != priors.size()) {
        throw Error(ErrorCode::DimensionMismatch, "ensemble needs one prior per state");
    }
    validate_priors(priors);
    for (const auto& k : states) {
        if (k.dim() != states.front().dim()) {
            throw Error(ErrorCode::DimensionMismatch, "ensemble states differ in dimension");
        }
    }
}

CMatrix Ensemble::gram() const {
    CMatrix g(size(), size());
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t j = 0; j < size(); ++j) {
            g(i, j) = inner(states[i], states[j]);
        }
    }
    return g;
}

GramSpec::GramSpec(CMatrix overlaps_in, std::vector<double> priors_in)
    : overlaps(std::move(overlaps_in)), priors(std::move(priors_in)) {
    if (!overlaps.is_square() || overlaps.rows() != priors.size()) {
        throw Error(ErrorCode::DimensionMismatch, "overlap matrix must be n x n for n priors");
    }
    validate_priors(priors);
    for (std::size_t i = 0; i < overlaps.rows(); ++i) {
        if (std::abs(overlaps(i, i) - Complex{1.0, 0.0}) > kKetNormTol) {
            throw Error(ErrorCode::InvalidArgument, "overlap diagonal must be 1");
        }
    }
    if (hermiticity_residual(overlaps) > tol::herm) {
        throw Error(ErrorCode::NotHermitian, "overlap matrix is not Hermitian");
    }
}

Ensemble states_from_gram(const GramSpec& spec) {
    const CMatrix l = psd_cholesky(spec.overlaps);
    const std::size_t n = l.rows();
    std::vector<Ket> kets;
    kets.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        CVector v(n);
        for (std::size_t k = 0; k < n; ++k) {
            v[k] = std::conj(l(i, k));
        }
        // Unit diagonal makes each row unit-norm up to factorization error.
        kets.push_back(Ket::normalized(std::move(v)));
    }
    return Ensemble(std::move(kets), spec.priors);
}

DensityMatrix ensemble_density(const Ensemble& e) {
    CMatrix rho(e.dim(), e.dim());
    for (std::size_t i = 0; i < e.size(); ++i) {
        rho += e.states[i].projector() * Complex{e.priors[i], 0.0};
    }
    return DensityMatrix(std::move(rho));
}

Ket extend_with_ancilla(const Ket& k, std::size_t ancilla_dim, std::size_t ancilla_index) {
    if (ancilla_index >= ancilla_dim) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "ancilla index " + std::to_string(ancilla_index) + " >= " + std::to_string(ancilla_dim));
    }
    const Ket a = Ket::basis(ancilla_dim, ancilla_index);
    return Ket(kron(k.amplitudes(), a.amplitudes()));
}

} // namespace qsd
