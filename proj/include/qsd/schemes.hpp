#pragma once

// Concrete discrimination schemes: an ensemble on the principal system, a
// joint unitary coupling it to an ancilla prepared in |0_a>, a POVM on the
// joint space, and the closed-form success probability of the scheme.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qsd/linalg.hpp"
#include "qsd/measurement.hpp"
#include "qsd/states.hpp"

namespace qsd {

struct RraParams {
    Complex c_plus;
    Complex c_minus;
};

struct MixedSpecialParams {
    double gamma;
};

struct MixedGeneralParams {
    double gamma;
    double alpha;
};

/// x_i = |alpha_i|^2 of the ancilla-assisted unambiguous family.
struct UnambiguousSpecialParams {
    double gamma;
    double x0;
    double x1;
};

/// g_ij = <u_i|u_j>.
struct ZeroAuxParams {
    Complex g01;
    Complex g12;
    Complex g20;
};

using SchemeParams =
    std::variant<RraParams, MixedSpecialParams, MixedGeneralParams, UnambiguousSpecialParams, ZeroAuxParams>;

/// "rra", "mixed-special", "mixed-general", "unambiguous-special" or "zero-aux".
std::string scheme_kind(const SchemeParams& params);

struct Scheme {
    Ensemble ensemble;          // states on the principal system
    std::size_t ancilla_dim;    // 1 means no ancilla
    CMatrix coupling;           // unitary on system (x) ancilla
    Povm povm;                  // on system (x) ancilla
    double analytic_success;
    SchemeParams params;
    std::string branch_note;

    std::size_t joint_dim() const noexcept { return coupling.rows(); }
    /// U (u_i (x) |0_a>) with the original priors.
    Ensemble coupled_ensemble() const;
    /// sum_i p_i U (|u_i><u_i| (x) |0_a><0_a|) U^dagger
    DensityMatrix coupled_density() const;
};

struct BuildOptions {
    /// Admit the degenerate parameters the constructions exclude
    /// (gamma = 0, alpha in {0, 1}).
    bool allow_trivial = false;
};

/// Two-state scheme with a qubit ancilla. Requires conj(c_-) c_+ = <psi_-|psi_+>
/// and |c_+-| <= 1; outcomes identify psi_+ (0), psi_- (1) or are inconclusive.
Scheme build_rra(const Ket& psi_plus, const Ket& psi_minus, std::span<const double> priors, Complex c_plus,
                 Complex c_minus);

/// Same, with psi_+- synthesized in C^2 so that <psi_-|psi_+> = conj(c_-) c_+.
Scheme build_rra(Complex c_plus, Complex c_minus, std::span<const double> priors);

struct XuMaximum {
    double value;
    std::string case_tag; // "1", "2", "3", "4" or "1-limit"
    std::array<double, 3> sorted_priors;
    std::array<std::size_t, 3> permutation; // sorted_priors[k] = priors[permutation[k]]
    double gamma1;                          // +inf in the degenerate limit
    double gamma2;
};

/// Piecewise optimal unambiguous success probability for three states with
/// equal real pairwise overlap gamma. Priors are sorted ascending internally.
XuMaximum xu_max_unambiguous(double gamma, std::span<const double> priors);

/// Ascending order of three priors, with the permutation used.
std::pair<std::array<double, 3>, std::array<std::size_t, 3>> sort_priors(std::span<const double> priors);

/// Mixed ambiguous/unambiguous scheme for <u_2|u_0> = <u_2|u_1> = gamma,
/// <u_0|u_1> = 0. Success 1 - 2 gamma^2 (1 - p_2).
Scheme build_mixed_special(double gamma, std::span<const double> priors, BuildOptions options = {});

/// Mixed scheme for <u_0|u_1> = alpha. Success 1 - (2 gamma^2 - alpha)(1 - p_2)
/// when alpha < gamma^2, else 1 - alpha (1 - p_2).
Scheme build_mixed_general(double gamma, double alpha, std::span<const double> priors,
                           BuildOptions options = {});

/// Ancilla-assisted unambiguous scheme in the orthogonal-pair geometry with
/// orthonormal failure directions. Success
/// 1 - p_0 x_0 - p_1 x_1 - p_2 gamma^2 (1/x_0 + 1/x_1).
Scheme build_unambiguous_special(double gamma, double x0, double x1, std::span<const double> priors,
                                 BuildOptions options = {});

/// Ancilla-free scheme for overlaps with conj(g12 g20) = g01. The third POVM
/// element is I - pi_0 - pi_1.
Scheme build_zero_aux(Complex g01, Complex g12, Complex g20, std::span<const double> priors);

/// P(u_2 | outcome 2) with the outcome-2 element taken as |u_2><u_2|:
/// p_2 / (p_0 |g20|^2 + p_1 |g12|^2 + p_2).
double zero_aux_posterior(const Scheme& scheme);

/// Two-term product decomposition of the coupled state of a mixed scheme
/// with p_0 = p_1:
///   rho = (1 - w) part_system (x) |0_a><0_a| + w |1><1| (x) part_ancilla.
/// part_ancilla is returned as printed, without asserting positivity.
struct SeparableDecomposition {
    double weight;
    CMatrix part_system;
    CMatrix part_ancilla;
    double reconstruction_residual; // ||rho - decomposition||_F
    std::vector<double> ancilla_part_spectrum;
    double system_trace;
    double ancilla_trace;
};

SeparableDecomposition separable_decomposition(const Scheme& scheme);

} // namespace qsd
