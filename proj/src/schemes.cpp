#include "qsd/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qsd/error.hpp"

namespace qsd {

namespace {

constexpr double kOverlapTol = 1e-10;
constexpr double kBoundaryTol = 1e-12;

// Joint-space basis index for |s>|a> with a qubit ancilla.
constexpr std::size_t joint(std::size_t s, std::size_t a) { return s * 2 + a; }

void require_prior_count(std::span<const double> priors, std::size_t n) {
    if (priors.size() != n) {
        throw Error(ErrorCode::InvalidArgument,
                    "expected " + std::to_string(n) + " priors, got " + std::to_string(priors.size()));
    }
    validate_priors(priors);
}

CVector combine(std::initializer_list<std::pair<Complex, const CVector*>> terms) {
    CVector out(terms.begin()->second->size(), Complex{0.0, 0.0});
    for (const auto& [coef, v] : terms) {
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] += coef * (*v)[k];
        }
    }
    return out;
}

CVector unit(std::size_t dim, std::size_t i) {
    CVector v(dim, Complex{0.0, 0.0});
    v[i] = 1.0;
    return v;
}

std::vector<CVector> extended(const Ensemble& e, std::size_t ancilla_dim) {
    std::vector<CVector> out;
    for (const auto& k : e.states) {
        out.push_back(extend_with_ancilla(k, ancilla_dim, 0).amplitudes());
    }
    return out;
}

Ensemble synthesize(const CMatrix& overlaps, std::span<const double> priors) {
    try {
        return states_from_gram(GramSpec(overlaps, std::vector<double>(priors.begin(), priors.end())));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NotPsd) {
            throw Error(ErrorCode::GramNotPsd, e.what());
        }
        throw;
    }
}

// {pi_0, pi_1, pi_2, pi_fail} = {|+><+|, |-><-|, |2><2|} (x) |0_a><0_a| and I (x) |1_a><1_a|.
Povm mixed_povm() {
    const CMatrix zero_a = CMatrix::basis_projector(2, 0);
    const CMatrix one_a = CMatrix::basis_projector(2, 1);
    return Povm({kron(Ket::plus(3).projector(), zero_a), kron(Ket::minus(3).projector(), zero_a),
                 kron(CMatrix::basis_projector(3, 2), zero_a), kron(CMatrix::identity(3), one_a)},
                {OutcomeLabel::identify(0), OutcomeLabel::identify(1), OutcomeLabel::identify(2),
                 OutcomeLabel::inconclusive()});
}

// Shared construction for the mixed schemes: <u_2|u_0> = <u_2|u_1> = gamma,
// <u_0|u_1> = alpha.
Scheme build_mixed(double gamma, double alpha, std::span<const double> priors, SchemeParams params,
                   double analytic, std::string note) {
    const double g = gamma;
    Ensemble ens = synthesize(CMatrix{{1.0, alpha, g}, {alpha, 1.0, g}, {g, g, 1.0}}, priors);
    const auto v = extended(ens, 2);

    const double s = std::sqrt(1.0 - g * g);
    const CVector psi0 = combine({{1.0 / s, &v[0]}, {-g / s, &v[2]}});
    const CVector psi1 = combine({{1.0 / s, &v[1]}, {-g / s, &v[2]}});

    // c^2 = <psi_0|psi_1>; the principal branch keeps c * c = c^2.
    const Complex c = principal_sqrt((alpha - g * g) / (1.0 - g * g));
    const double a = std::sqrt(std::max(0.0, 1.0 - std::norm(c)));

    const double h = 1.0 / std::sqrt(2.0);
    CVector plus0(6), minus0(6);
    plus0[joint(0, 0)] = h;
    plus0[joint(1, 0)] = h;
    minus0[joint(0, 0)] = h;
    minus0[joint(1, 0)] = -h;
    const CVector one1 = unit(6, joint(1, 1));
    const CVector two0 = unit(6, joint(2, 0));

    const std::vector<CVector> domain{v[2], psi0, psi1};
    const std::vector<CVector> image{two0, combine({{a, &plus0}, {std::conj(c), &one1}}),
                                     combine({{a, &minus0}, {c, &one1}})};
    CMatrix u = isometry_completion(domain, image, 6);

    return Scheme{std::move(ens), 2, std::move(u), mixed_povm(), analytic, params, std::move(note)};
}

void require_finite(double x, ErrorCode code, const char* name) {
    if (!std::isfinite(x)) {
        throw Error(code, std::string(name) + " must be finite");
    }
}

} // namespace

std::string scheme_kind(const SchemeParams& params) {
    struct Visitor {
        std::string operator()(const RraParams&) const { return "rra"; }
        std::string operator()(const MixedSpecialParams&) const { return "mixed-special"; }
        std::string operator()(const MixedGeneralParams&) const { return "mixed-general"; }
        std::string operator()(const UnambiguousSpecialParams&) const { return "unambiguous-special"; }
        std::string operator()(const ZeroAuxParams&) const { return "zero-aux"; }
    };
    return std::visit(Visitor{}, params);
}

Ensemble Scheme::coupled_ensemble() const {
    std::vector<Ket> kets;
    kets.reserve(ensemble.size());
    for (const auto& k : ensemble.states) {
        kets.push_back(Ket::normalized(coupling.apply(extend_with_ancilla(k, ancilla_dim, 0).amplitudes())));
    }
    return Ensemble(std::move(kets), ensemble.priors);
}

DensityMatrix Scheme::coupled_density() const { return ensemble_density(coupled_ensemble()); }

Scheme build_rra(const Ket& psi_plus, const Ket& psi_minus, std::span<const double> priors, Complex c_plus,
                 Complex c_minus) {
    require_prior_count(priors, 2);
    if (psi_plus.dim() != 2 || psi_minus.dim() != 2) {
        throw Error(ErrorCode::DimensionMismatch, "the two-state scheme acts on a qubit");
    }
    if (std::abs(c_plus) > 1.0 + kBoundaryTol || std::abs(c_minus) > 1.0 + kBoundaryTol) {
        throw Error(ErrorCode::AmplitudeOutOfRange, "|c_+| and |c_-| must not exceed 1");
    }
    const Complex overlap = inner(psi_minus, psi_plus);
    if (std::abs(std::conj(c_minus) * c_plus - overlap) > kOverlapTol) {
        throw Error(ErrorCode::OverlapConstraintViolated, "conj(c_-) c_+ must equal <psi_-|psi_+>");
    }

    Ensemble ens({psi_plus, psi_minus}, std::vector<double>(priors.begin(), priors.end()));
    const auto v = extended(ens, 2);

    const double h = 1.0 / std::sqrt(2.0);
    CVector plus0(4), minus0(4);
    plus0[joint(0, 0)] = h;
    plus0[joint(1, 0)] = h;
    minus0[joint(0, 0)] = h;
    minus0[joint(1, 0)] = -h;
    const CVector zero1 = unit(4, joint(0, 1));
    const double ap = std::sqrt(std::max(0.0, 1.0 - std::norm(c_plus)));
    const double am = std::sqrt(std::max(0.0, 1.0 - std::norm(c_minus)));
    const std::vector<CVector> image{combine({{ap, &plus0}, {c_plus, &zero1}}),
                                     combine({{am, &minus0}, {c_minus, &zero1}})};
    CMatrix u = isometry_completion(v, image, 4);

    const CMatrix zero_a = CMatrix::basis_projector(2, 0);
    Povm povm({kron(Ket::plus(2).projector(), zero_a), kron(Ket::minus(2).projector(), zero_a),
               kron(CMatrix::identity(2), CMatrix::basis_projector(2, 1))},
              {OutcomeLabel::identify(0), OutcomeLabel::identify(1), OutcomeLabel::inconclusive()});

    const double analytic = 1.0 - priors[0] * std::norm(c_plus) - priors[1] * std::norm(c_minus);
    return Scheme{std::move(ens), 2, std::move(u), std::move(povm), analytic, RraParams{c_plus, c_minus}, ""};
}

Scheme build_rra(Complex c_plus, Complex c_minus, std::span<const double> priors) {
    require_prior_count(priors, 2);
    if (std::abs(c_plus) > 1.0 + kBoundaryTol || std::abs(c_minus) > 1.0 + kBoundaryTol) {
        throw Error(ErrorCode::AmplitudeOutOfRange, "|c_+| and |c_-| must not exceed 1");
    }
    // G_01 = <psi_+|psi_-> = conj(<psi_-|psi_+>) = c_- conj(c_+)
    const Complex g01 = c_minus * std::conj(c_plus);
    const Ensemble ens = synthesize(CMatrix{{1.0, g01}, {std::conj(g01), 1.0}}, priors);
    return build_rra(ens.states[0], ens.states[1], priors, c_plus, c_minus);
}

std::pair<std::array<double, 3>, std::array<std::size_t, 3>> sort_priors(std::span<const double> priors) {
    require_prior_count(priors, 3);
    std::array<std::size_t, 3> perm{0, 1, 2};
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t i, std::size_t j) { return priors[i] < priors[j]; });
    return {{priors[perm[0]], priors[perm[1]], priors[perm[2]]}, perm};
}

XuMaximum xu_max_unambiguous(double gamma, std::span<const double> priors) {
    if (!std::isfinite(gamma) || gamma < 0.0 || gamma >= 1.0) {
        throw Error(ErrorCode::InvalidGamma, "overlap must lie in [0, 1)");
    }
    const auto [sorted, perm] = sort_priors(priors);
    const auto [p0, p1, p2] = sorted;
    const double gap = std::sqrt(p2) - std::sqrt(p1);

    XuMaximum out{0.0, "", sorted, perm, std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity()};
    if (gap < 1e-12) {
        out.value = 1.0 - gamma;
        out.case_tag = "1-limit";
        return out;
    }
    out.gamma1 = std::sqrt(p1) / gap;
    out.gamma2 = std::sqrt(p0) / gap;
    const double g = gamma;
    if (out.gamma2 >= 1.0) {
        out.value = 1.0 - g;
        out.case_tag = "1";
    } else if (g >= out.gamma1) {
        out.value = 1.0 - p0 - p1 - 2.0 * p2 * g * g / (g + 1.0);
        out.case_tag = "2";
    } else if (g >= out.gamma2) {
        out.value = 1.0 - p0 - 2.0 * std::sqrt(p1 * p2) * g - gap * gap * g * g;
        out.case_tag = "3";
    } else {
        out.value = 1.0 - 2.0 * (std::sqrt(p1 * p2) + std::sqrt(p0 * p2) - std::sqrt(p0 * p1)) * g;
        out.case_tag = "4";
    }
    return out;
}

Scheme build_mixed_special(double gamma, std::span<const double> priors, BuildOptions options) {
    require_prior_count(priors, 3);
    require_finite(gamma, ErrorCode::GammaOutOfRange, "gamma");
    if (gamma == 0.0 && !options.allow_trivial) {
        throw Error(ErrorCode::GammaOutOfRange, "gamma = 0 is the orthogonal case; pass allow_trivial");
    }
    if (1.0 - 2.0 * gamma * gamma < -kBoundaryTol) {
        throw Error(ErrorCode::GammaOutOfRange, "|gamma| must not exceed 1/sqrt(2)");
    }
    const double analytic = 1.0 - 2.0 * gamma * gamma * (1.0 - priors[2]);
    return build_mixed(gamma, 0.0, priors, MixedSpecialParams{gamma}, analytic, "");
}

Scheme build_mixed_general(double gamma, double alpha, std::span<const double> priors, BuildOptions options) {
    require_prior_count(priors, 3);
    require_finite(gamma, ErrorCode::ParamOutOfRange, "gamma");
    require_finite(alpha, ErrorCode::ParamOutOfRange, "alpha");
    if (std::abs(gamma) >= 1.0) {
        throw Error(ErrorCode::ParamOutOfRange, "|gamma| must be below 1");
    }
    if (!options.allow_trivial && (gamma == 0.0 || alpha == 0.0 || alpha == 1.0)) {
        throw Error(ErrorCode::ParamOutOfRange, "gamma = 0 and alpha in {0, 1} need allow_trivial");
    }
    const double g2 = gamma * gamma;
    if (std::abs(alpha) > 1.0 + kBoundaryTol || 1.0 + alpha - 2.0 * g2 < -kBoundaryTol) {
        throw Error(ErrorCode::GramNotPsd, "overlaps need |alpha| <= 1 and 1 + alpha >= 2 gamma^2");
    }
    if (g2 + std::abs(alpha - g2) > 1.0 + kBoundaryTol) {
        throw Error(ErrorCode::ParamOutOfRange, "gamma^2 + |alpha - gamma^2| must not exceed 1");
    }
    const double q = 1.0 - priors[2];
    const bool below = alpha < g2;
    const double analytic = below ? 1.0 - (2.0 * g2 - alpha) * q : 1.0 - alpha * q;
    return build_mixed(gamma, alpha, priors, MixedGeneralParams{gamma, alpha}, analytic,
                       below ? "alpha < gamma^2" : "alpha >= gamma^2");
}

Scheme build_unambiguous_special(double gamma, double x0, double x1, std::span<const double> priors,
                                 BuildOptions options) {
    require_prior_count(priors, 3);
    require_finite(gamma, ErrorCode::GammaOutOfRange, "gamma");
    if (gamma == 0.0 && !options.allow_trivial) {
        throw Error(ErrorCode::GammaOutOfRange, "gamma = 0 is the orthogonal case; pass allow_trivial");
    }
    if (1.0 - 2.0 * gamma * gamma < -kBoundaryTol) {
        throw Error(ErrorCode::GammaOutOfRange, "|gamma| must not exceed 1/sqrt(2)");
    }
    if (!std::isfinite(x0) || !std::isfinite(x1)) {
        throw Error(ErrorCode::InfeasibleAmplitudes, "x0, x1 must be finite");
    }
    const double g2 = gamma * gamma;
    for (double x : {x0, x1}) {
        if (x < g2 - kBoundaryTol || x > 1.0 + kBoundaryTol || x < 0.0) {
            throw Error(ErrorCode::InfeasibleAmplitudes, "x_i must lie in [gamma^2, 1]");
        }
    }
    // |alpha'_i|^2 = gamma^2 / x_i
    const double y0 = gamma == 0.0 ? 0.0 : g2 / x0;
    const double y1 = gamma == 0.0 ? 0.0 : g2 / x1;
    if (y0 + y1 > 1.0 + kBoundaryTol) {
        throw Error(ErrorCode::InfeasibleAmplitudes, "gamma^2 (1/x0 + 1/x1) exceeds 1");
    }

    const double g = gamma;
    Ensemble ens = synthesize(CMatrix{{1.0, 0.0, g}, {0.0, 1.0, g}, {g, g, 1.0}}, priors);
    const auto v = extended(ens, 2);

    // Failure directions phi_0 = |0>, phi_1 = |1>; alpha_i real positive and
    // alpha'_i = gamma / alpha_i so that conj(alpha'_i) alpha_i = gamma.
    const double a0 = std::sqrt(std::clamp(x0, 0.0, 1.0));
    const double a1 = std::sqrt(std::clamp(x1, 0.0, 1.0));
    const double ap0 = gamma == 0.0 ? 0.0 : g / a0;
    const double ap1 = gamma == 0.0 ? 0.0 : g / a1;
    CVector img0(6), img1(6), img2(6);
    img0[joint(0, 0)] = std::sqrt(std::max(0.0, 1.0 - x0));
    img0[joint(0, 1)] = a0;
    img1[joint(1, 0)] = std::sqrt(std::max(0.0, 1.0 - x1));
    img1[joint(1, 1)] = a1;
    img2[joint(2, 0)] = std::sqrt(std::max(0.0, 1.0 - y0 - y1));
    img2[joint(0, 1)] = ap0;
    img2[joint(1, 1)] = ap1;
    CMatrix u = isometry_completion(v, std::vector<CVector>{img0, img1, img2}, 6);

    const CMatrix zero_a = CMatrix::basis_projector(2, 0);
    Povm povm({kron(CMatrix::basis_projector(3, 0), zero_a), kron(CMatrix::basis_projector(3, 1), zero_a),
               kron(CMatrix::basis_projector(3, 2), zero_a),
               kron(CMatrix::identity(3), CMatrix::basis_projector(2, 1))},
              {OutcomeLabel::identify(0), OutcomeLabel::identify(1), OutcomeLabel::identify(2),
               OutcomeLabel::inconclusive()});

    const double analytic = 1.0 - priors[0] * x0 - priors[1] * x1 - priors[2] * (y0 + y1);
    return Scheme{std::move(ens), 2, std::move(u), std::move(povm), analytic,
                  UnambiguousSpecialParams{gamma, x0, x1}, ""};
}

Scheme build_zero_aux(Complex g01, Complex g12, Complex g20, std::span<const double> priors) {
    require_prior_count(priors, 3);
    if (std::abs(std::conj(g12 * g20) - g01) > kOverlapTol) {
        throw Error(ErrorCode::OverlapConstraintViolated, "conj(g12 g20) must equal g01");
    }
    if (std::abs(g12) >= 1.0 || std::abs(g20) >= 1.0) {
        throw Error(ErrorCode::OverlapConstraintViolated, "|g12| and |g20| must be below 1");
    }
    // G_ij = <u_i|u_j>
    Ensemble ens = synthesize(CMatrix{{1.0, g01, std::conj(g20)}, {std::conj(g01), 1.0, g12}, {g20, std::conj(g12), 1.0}},
                              priors);
    const CVector& u0 = ens.states[0].amplitudes();
    const CVector& u1 = ens.states[1].amplitudes();
    const CVector& u2 = ens.states[2].amplitudes();
    const double s0 = std::sqrt(1.0 - std::norm(g20));
    const double s1 = std::sqrt(1.0 - std::norm(g12));
    const Ket psi0 = Ket::normalized(combine({{1.0 / s0, &u0}, {-g20 / s0, &u2}}));
    const Ket psi1 = Ket::normalized(combine({{1.0 / s1, &u1}, {-std::conj(g12) / s1, &u2}}));

    const CMatrix pi0 = psi0.projector();
    const CMatrix pi1 = psi1.projector();
    CMatrix pi2 = CMatrix::identity(3) - pi0 - pi1;
    pi2 = (pi2 + pi2.adjoint()) * Complex{0.5, 0.0};
    Povm povm({pi0, pi1, pi2}, {OutcomeLabel::identify(0), OutcomeLabel::identify(1), OutcomeLabel::identify(2)});

    const double analytic =
        priors[0] * (1.0 - std::norm(g20)) + priors[1] * (1.0 - std::norm(g12)) + priors[2];
    return Scheme{std::move(ens), 1, CMatrix::identity(3), std::move(povm), analytic, ZeroAuxParams{g01, g12, g20}, ""};
}

double zero_aux_posterior(const Scheme& scheme) {
    if (!std::holds_alternative<ZeroAuxParams>(scheme.params)) {
        throw Error(ErrorCode::InvalidArgument, "posterior is defined for the ancilla-free scheme only");
    }
    const auto& e = scheme.ensemble;
    double denom = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        denom += e.priors[i] * std::norm(inner(e.states[2], e.states[i]));
    }
    if (denom <= 1e-300) {
        throw Error(ErrorCode::ZeroProbabilityOutcome, "outcome 2 never fires");
    }
    return e.priors[2] / denom;
}

SeparableDecomposition separable_decomposition(const Scheme& scheme) {
    double gamma = 0.0;
    double alpha = 0.0;
    if (const auto* s = std::get_if<MixedSpecialParams>(&scheme.params)) {
        gamma = s->gamma;
    } else if (const auto* g = std::get_if<MixedGeneralParams>(&scheme.params)) {
        gamma = g->gamma;
        alpha = g->alpha;
    } else {
        throw Error(ErrorCode::InvalidArgument, "decomposition applies to the mixed schemes only");
    }
    const auto& priors = scheme.ensemble.priors;
    if (std::abs(priors[0] - priors[1]) > 1e-12) {
        throw Error(ErrorCode::HypothesisViolated, "decomposition needs p_0 = p_1");
    }
    const double g2 = gamma * gamma;
    if (alpha >= g2) {
        throw Error(ErrorCode::HypothesisViolated, "decomposition needs alpha < gamma^2");
    }

    const double p2 = priors[2];
    const double q = 1.0 - p2;
    const double gap = g2 - alpha;             // gamma^2 - alpha
    const double spread = std::max(0.0, 1.0 + alpha - 2.0 * g2);
    const double w = q * gap;
    const double h = std::sqrt(2.0) / 2.0;

    const CMatrix plus = Ket::plus(3).projector();
    const CMatrix minus = Ket::minus(3).projector();
    const CMatrix e02 = CMatrix::outer(Ket::basis(3, 0).amplitudes(), Ket::basis(3, 2).amplitudes());
    CMatrix sys = (plus + minus) * Complex{0.5 * q * spread, 0.0} +
                  CMatrix::basis_projector(3, 2) * Complex{q * g2 + p2, 0.0} +
                  (e02 + e02.adjoint()) * Complex{h * q * gamma * std::sqrt(spread), 0.0};
    sys *= Complex{1.0 / (1.0 - w), 0.0};

    // Off-diagonal coefficient sqrt((alpha - gamma^2)(1 + alpha - 2 gamma^2)),
    // principal branch.
    const Complex z = principal_sqrt(-gap * spread);
    CMatrix anc(2, 2);
    anc(1, 1) = 1.0;
    anc(0, 1) = h * z / gap;
    anc(1, 0) = h * std::conj(z) / gap;

    const CMatrix recon = kron(sys, CMatrix::basis_projector(2, 0)) * Complex{1.0 - w, 0.0} +
                          kron(CMatrix::basis_projector(3, 1), anc) * Complex{w, 0.0};
    const DensityMatrix rho = scheme.coupled_density();

    return SeparableDecomposition{w,
                                  sys,
                                  anc,
                                  frobenius_norm(rho.matrix() - recon),
                                  hermitian_eig(anc).values,
                                  sys.trace().real(),
                                  anc.trace().real()};
}

} // namespace qsd
