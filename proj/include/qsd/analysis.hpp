#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "qsd/linalg.hpp"
#include "qsd/states.hpp"

namespace qsd {

enum class ReferenceKind { XuMax, Theorem21Bound, FamilyOptimum };

std::string to_string(ReferenceKind kind);

/// One comparison of a mixed-scheme success probability against an
/// unambiguous reference value.
struct ComparisonRecord {
    double gamma = 0.0;
    std::optional<double> alpha;
    std::array<double, 3> priors{};
    double p_mixed = 0.0;
    double p_una_reference = 0.0;
    ReferenceKind reference_kind = ReferenceKind::FamilyOptimum;
    double margin = 0.0; // p_mixed - p_una_reference
    bool verdict = false;

    // Not part of the CSV row.
    bool hypothesis_holds = true;
    std::optional<double> theorem_bound;          // 1 - gamma^2 (1 + p_2)
    std::string xu_case;                          // Xu case tag, equal-overlap checks only
    std::array<std::size_t, 3> permutation{0, 1, 2}; // priors[k] = input[permutation[k]]
};

/// Margin threshold for a passing verdict.
inline constexpr double kVerdictTol = 1e-12;

struct FamilyOptimum {
    double x0;
    double x1;
    double value;
};

/// Maximizes 1 - p0 x0 - p1 x1 - p2 gamma^2 (1/x0 + 1/x1) over x_i in
/// [gamma^2, 1] with gamma^2 (1/x0 + 1/x1) <= 1. Closed form: the box-clipped
/// stationary point when feasible, otherwise the optimum on the constraint
/// boundary.
FamilyOptimum optimize_unambiguous_special(double gamma, std::span<const double> priors);

/// Exhaustive grid search of the same problem. Test oracle.
FamilyOptimum grid_optimize_unambiguous_special(double gamma, std::span<const double> priors,
                                                double step = 1e-3);

struct SymmetricOptimum {
    std::array<double, 3> x; // squared failure amplitudes
    double value;
};

/// Optimal unambiguous success for three states with equal real overlap
/// gamma, by grid search over the failure-amplitude Gram matrix
/// [[x0, g, g], [g, x1, g], [g, g, x2]] >= 0, x_i <= 1: x0, x1 on a grid,
/// x2 at its Schur-complement minimum, then a local refinement pass.
/// Priors are used as given (no sorting).
SymmetricOptimum grid_optimize_symmetric_unambiguous(double gamma, std::span<const double> priors,
                                                     double step = 1e-3);

/// Mixed scheme vs the best member of the ancilla-assisted unambiguous family
/// for <u_0|u_1> = 0, <u_2|u_0> = <u_2|u_1> = gamma. The hypothesis is p_2 >= 1/3.
ComparisonRecord theorem21_check(double gamma, std::span<const double> priors);

/// Equal-overlap mixed scheme (alpha = gamma) vs the piecewise optimum.
/// Priors are sorted so that p_2 is largest.
ComparisonRecord theorem31_check(double gamma, std::span<const double> priors);

struct ClassicalityReport {
    bool classical;
    double residual;
};

/// ||[rho, P]||_F <= 1e-10.
ClassicalityReport left_classicality_check(const CMatrix& rho_part, const CMatrix& projector);

/// Classical on the ancilla side iff every block
/// B_mn = (<m| (x) I) rho (|n> (x) I) is normal and all blocks commute
/// (tolerance 1e-9). The residual is the largest violation found.
ClassicalityReport right_classicality_check(const DensityMatrix& rho, std::size_t dim_system,
                                            std::size_t dim_ancilla);

} // namespace qsd
