#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qsd/linalg.hpp"

namespace qsd {

/// Unit state vector. Construction rejects amplitudes whose 2-norm is not 1
/// within 1e-10; use Ket::normalized to rescale arbitrary input.
class Ket {
public:
    explicit Ket(CVector amplitudes);

    static Ket normalized(CVector amplitudes);
    static Ket basis(std::size_t dim, std::size_t index);
    /// (|0> + sign |1>)/sqrt(2) embedded in C^dim.
    static Ket plus(std::size_t dim);
    static Ket minus(std::size_t dim);

    std::size_t dim() const noexcept { return amplitudes_.size(); }
    const CVector& amplitudes() const noexcept { return amplitudes_; }
    Complex operator[](std::size_t i) const { return amplitudes_[i]; }
    CMatrix projector() const { return CMatrix::projector(amplitudes_); }

private:
    CVector amplitudes_;
};

/// <a|b>
inline Complex inner(const Ket& a, const Ket& b) { return inner(a.amplitudes(), b.amplitudes()); }

/// Positive unit-trace operator (Hermitian, PSD and trace checked within 1e-9).
class DensityMatrix {
public:
    explicit DensityMatrix(CMatrix matrix);

    static DensityMatrix pure(const Ket& k) { return DensityMatrix(k.projector()); }

    std::size_t dim() const noexcept { return matrix_.rows(); }
    const CMatrix& matrix() const noexcept { return matrix_; }

private:
    CMatrix matrix_;
};

/// Pure states with a prior distribution.
struct Ensemble {
    std::vector<Ket> states;
    std::vector<double> priors;

    Ensemble(std::vector<Ket> states, std::vector<double> priors);

    std::size_t size() const noexcept { return states.size(); }
    std::size_t dim() const noexcept { return states.empty() ? 0 : states.front().dim(); }
    /// Pairwise inner products G_ij = <u_i|u_j>.
    CMatrix gram() const;
};

/// Prescribed overlaps G_ij = <u_i|u_j> (Hermitian, unit diagonal) and priors.
struct GramSpec {
    CMatrix overlaps;
    std::vector<double> priors;

    GramSpec(CMatrix overlaps, std::vector<double> priors);
};

/// Throws InvalidArgument unless the priors are non-negative and sum to 1.
void validate_priors(std::span<const double> priors);

/// Kets in C^n reproducing the overlaps: u_i is the conjugated i-th row of
/// the Cholesky factor, so the diagonal pivots are real and non-negative.
Ensemble states_from_gram(const GramSpec& spec);

/// rho = sum_i p_i |u_i><u_i|
DensityMatrix ensemble_density(const Ensemble& e);

/// k (x) e_index in C^{dim * ancilla_dim}, system-major ordering.
Ket extend_with_ancilla(const Ket& k, std::size_t ancilla_dim, std::size_t ancilla_index);

} // namespace qsd
