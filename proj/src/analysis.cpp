#include "qsd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "qsd/error.hpp"
#include "qsd/schemes.hpp"

namespace qsd {

namespace {

constexpr double kBoundaryTol = 1e-12;

void require_three_priors(std::span<const double> priors) {
    if (priors.size() != 3) {
        throw Error(ErrorCode::InvalidArgument, "expected three priors");
    }
    validate_priors(priors);
}

double family_value(double g2, std::span<const double> p, double x0, double x1) {
    return 1.0 - p[0] * x0 - p[1] * x1 - p[2] * g2 * (1.0 / x0 + 1.0 / x1);
}

std::vector<double> grid_points(double lo, double hi, double step) {
    std::vector<double> pts;
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long k = 0; k <= n; ++k) {
        pts.push_back(lo + static_cast<double>(k) * step);
    }
    if (pts.back() < hi - 1e-12) {
        pts.push_back(hi);
    }
    return pts;
}

// Minimal x2 keeping [[x0, g, g], [g, x1, g], [g, g, x2]] PSD, or a negative
// value when x0, x1 admit none.
double schur_min_x2(double g, double x0, double x1) {
    const double det = x0 * x1 - g * g;
    if (x0 < 0.0 || x1 < 0.0 || det <= 0.0) {
        return -1.0;
    }
    return std::max(0.0, g * g * (x0 + x1 - 2.0 * g) / det);
}

} // namespace

std::string to_string(ReferenceKind kind) {
    switch (kind) {
    case ReferenceKind::XuMax: return "xu_max";
    case ReferenceKind::Theorem21Bound: return "theorem21_bound";
    case ReferenceKind::FamilyOptimum: return "family_optimum";
    }
    return "unknown";
}

FamilyOptimum optimize_unambiguous_special(double gamma, std::span<const double> priors) {
    require_three_priors(priors);
    if (!std::isfinite(gamma)) {
        throw Error(ErrorCode::GammaOutOfRange, "gamma must be finite");
    }
    const double g2 = gamma * gamma;
    if (g2 > 0.5 + kBoundaryTol) {
        throw Error(ErrorCode::Infeasible, "no feasible amplitudes for gamma^2 > 1/2");
    }
    if (gamma == 0.0) {
        return {0.0, 0.0, 1.0};
    }
    const double g = std::abs(gamma);

    auto stationary = [&](double p) {
        if (p <= 0.0) {
            return 1.0;
        }
        return std::clamp(g * std::sqrt(priors[2] / p), g2, 1.0);
    };
    double x0 = stationary(priors[0]);
    double x1 = stationary(priors[1]);
    if (g2 * (1.0 / x0 + 1.0 / x1) <= 1.0 + kBoundaryTol) {
        return {x0, x1, family_value(g2, priors, x0, x1)};
    }

    // Active constraint: with y_i = gamma^2 / x_i and y0 + y1 = 1 the objective
    // is 1 - p2 - gamma^2 (p0 / y0 + p1 / y1), convex in y0.
    const double r0 = std::sqrt(priors[0]);
    const double r1 = std::sqrt(priors[1]);
    double y0 = (r0 + r1) > 0.0 ? r0 / (r0 + r1) : 0.5;
    y0 = std::clamp(y0, g2, 1.0 - g2);
    x0 = std::min(1.0, g2 / y0);
    x1 = std::min(1.0, g2 / (1.0 - y0));
    return {x0, x1, 1.0 - priors[0] * x0 - priors[1] * x1 - priors[2]};
}

FamilyOptimum grid_optimize_unambiguous_special(double gamma, std::span<const double> priors, double step) {
    require_three_priors(priors);
    const double g2 = gamma * gamma;
    if (g2 > 0.5 + kBoundaryTol) {
        throw Error(ErrorCode::Infeasible, "no feasible amplitudes for gamma^2 > 1/2");
    }
    if (gamma == 0.0) {
        return {0.0, 0.0, 1.0};
    }
    const auto xs = grid_points(g2, 1.0, step);
    FamilyOptimum best{0.0, 0.0, -1.0};
    for (double x0 : xs) {
        for (double x1 : xs) {
            if (g2 * (1.0 / x0 + 1.0 / x1) > 1.0 + kBoundaryTol) {
                continue;
            }
            const double v = family_value(g2, priors, x0, x1);
            if (v > best.value) {
                best = {x0, x1, v};
            }
        }
    }
    if (best.value < 0.0 && std::abs(g2 - 0.5) <= kBoundaryTol) {
        best = {1.0, 1.0, family_value(g2, priors, 1.0, 1.0)};
    }
    return best;
}

SymmetricOptimum grid_optimize_symmetric_unambiguous(double gamma, std::span<const double> priors, double step) {
    require_three_priors(priors);
    if (!std::isfinite(gamma) || gamma < 0.0 || gamma >= 1.0) {
        throw Error(ErrorCode::InvalidGamma, "overlap must lie in [0, 1)");
    }
    if (gamma == 0.0) {
        return {{0.0, 0.0, 0.0}, 1.0};
    }
    SymmetricOptimum best{{1.0, 1.0, 1.0}, -1.0};
    auto consider = [&](double x0, double x1) {
        const double x2 = schur_min_x2(gamma, x0, x1);
        if (x2 < 0.0 || x2 > 1.0) {
            return;
        }
        const double v = 1.0 - priors[0] * x0 - priors[1] * x1 - priors[2] * x2;
        if (v > best.value) {
            best = {{x0, x1, x2}, v};
        }
    };
    // x0 x1 >= gamma^2 forces both above gamma^2.
    const auto xs = grid_points(gamma * gamma, 1.0, step);
    for (double x0 : xs) {
        for (double x1 : xs) {
            consider(x0, x1);
        }
    }
    // Refine around the coarse optimum.
    double fine = step;
    for (int round = 0; round < 3; ++round) {
        const double c0 = best.x[0];
        const double c1 = best.x[1];
        const double radius = 2.0 * fine;
        fine /= 20.0;
        const auto r0 = grid_points(std::max(gamma * gamma, c0 - radius), std::min(1.0, c0 + radius), fine);
        const auto r1 = grid_points(std::max(gamma * gamma, c1 - radius), std::min(1.0, c1 + radius), fine);
        for (double x0 : r0) {
            for (double x1 : r1) {
                consider(x0, x1);
            }
        }
    }
    return best;
}

ComparisonRecord theorem21_check(double gamma, std::span<const double> priors) {
    require_three_priors(priors);
    if (!std::isfinite(gamma) || gamma == 0.0 || 1.0 - 2.0 * gamma * gamma < -kBoundaryTol) {
        throw Error(ErrorCode::GammaOutOfRange, "theorem check needs 0 < |gamma| <= 1/sqrt(2)");
    }
    const double g2 = gamma * gamma;
    const auto family = optimize_unambiguous_special(gamma, priors);

    ComparisonRecord r;
    r.gamma = gamma;
    r.priors = {priors[0], priors[1], priors[2]};
    r.p_mixed = 1.0 - 2.0 * g2 * (1.0 - priors[2]);
    r.p_una_reference = family.value;
    r.reference_kind = ReferenceKind::FamilyOptimum;
    r.margin = r.p_mixed - r.p_una_reference;
    r.verdict = r.margin >= -kVerdictTol;
    r.hypothesis_holds = priors[2] >= 1.0 / 3.0 - kBoundaryTol;
    r.theorem_bound = 1.0 - g2 * (1.0 + priors[2]);
    return r;
}

ComparisonRecord theorem31_check(double gamma, std::span<const double> priors) {
    const auto xu = xu_max_unambiguous(gamma, priors);

    ComparisonRecord r;
    r.gamma = gamma;
    r.alpha = gamma;
    r.priors = xu.sorted_priors;
    r.permutation = xu.permutation;
    r.p_mixed = 1.0 - gamma * (1.0 - xu.sorted_priors[2]);
    r.p_una_reference = xu.value;
    r.reference_kind = ReferenceKind::XuMax;
    r.margin = r.p_mixed - r.p_una_reference;
    r.verdict = r.margin >= -kVerdictTol;
    r.xu_case = xu.case_tag;
    return r;
}

ClassicalityReport left_classicality_check(const CMatrix& rho_part, const CMatrix& projector) {
    const double r = frobenius_norm(commutator(rho_part, projector));
    return {r <= 1e-10, r};
}

ClassicalityReport right_classicality_check(const DensityMatrix& rho, std::size_t dim_system,
                                            std::size_t dim_ancilla) {
    if (dim_system * dim_ancilla != rho.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "subsystem dimensions do not multiply to the state dimension");
    }
    const CMatrix& m = rho.matrix();
    std::vector<CMatrix> blocks;
    for (std::size_t s = 0; s < dim_system; ++s) {
        for (std::size_t t = 0; t < dim_system; ++t) {
            CMatrix b(dim_ancilla, dim_ancilla);
            for (std::size_t a = 0; a < dim_ancilla; ++a) {
                for (std::size_t c = 0; c < dim_ancilla; ++c) {
                    b(a, c) = m(s * dim_ancilla + a, t * dim_ancilla + c);
                }
            }
            blocks.push_back(std::move(b));
        }
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const CMatrix& b = blocks[i];
        worst = std::max(worst, frobenius_norm(b * b.adjoint() - b.adjoint() * b));
        for (std::size_t j = i + 1; j < blocks.size(); ++j) {
            worst = std::max(worst, frobenius_norm(commutator(b, blocks[j])));
        }
    }
    return {worst <= 1e-9, worst};
}

} // namespace qsd
