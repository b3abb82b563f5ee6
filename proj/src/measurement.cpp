#include "qsd/measurement.hpp"

#include <algorithm>
#include <cmath>

#include "qsd/error.hpp"

namespace qsd {

namespace {
constexpr double kPovmTol = 1e-9;
constexpr double kUnambiguityTol = 1e-9;
constexpr double kZeroOutcome = 1e-12;

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

double expectation(const CMatrix& m, const Ket& k) {
    return inner(k.amplitudes(), m.apply(k.amplitudes())).real();
}

void require_dims(const Ensemble& e, const Povm& p) {
    if (e.dim() != p.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "ensemble dimension " + std::to_string(e.dim()) +
                                                      " vs POVM dimension " + std::to_string(p.dim()));
    }
}

void require_labels_in_range(const Ensemble& e, const Povm& p) {
    for (const auto& label : p.labels()) {
        if (label.is_identify() && label.index >= e.size()) {
            throw Error(ErrorCode::LabelMismatch, "outcome " + label.to_string() + " names no ensemble state");
        }
    }
}
} // namespace

std::string OutcomeLabel::to_string() const {
    return kind == Kind::Identify ? "identify:" + std::to_string(index) : "inconclusive";
}

OutcomeLabel OutcomeLabel::parse(const std::string& text) {
    if (text == "inconclusive") {
        return inconclusive();
    }
    constexpr std::string_view prefix = "identify:";
    if (text.rfind(prefix, 0) == 0 && text.size() > prefix.size()) {
        const std::string digits = text.substr(prefix.size());
        if (std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            return identify(std::stoul(digits));
        }
    }
    throw Error(ErrorCode::InvalidArgument, "bad outcome label '" + text + "'");
}

Povm::Povm(std::vector<CMatrix> elements, std::vector<OutcomeLabel> labels)
    : elements_(std::move(elements)), labels_(std::move(labels)) {
    if (elements_.empty()) {
        throw Error(ErrorCode::InvalidArgument, "POVM needs at least one element");
    }
    if (elements_.size() != labels_.size()) {
        throw Error(ErrorCode::LabelMismatch, "POVM needs one label per element");
    }
    const std::size_t n = elements_.front().rows();
    for (std::size_t x = 0; x < elements_.size(); ++x) {
        const auto& m = elements_[x];
        if (!m.is_square() || m.rows() != n) {
            throw Error(ErrorCode::DimensionMismatch, "POVM elements must share one square shape");
        }
        if (hermiticity_residual(m) > kPovmTol) {
            throw Error(ErrorCode::NotHermitian, "POVM element " + std::to_string(x));
        }
        const auto eig = hermitian_eig(m);
        if (eig.values.front() < -kPovmTol) {
            throw Error(ErrorCode::NotPsd, "POVM element " + std::to_string(x) + " has eigenvalue " +
                                               std::to_string(eig.values.front()));
        }
    }
    const double r = completeness_residual();
    if (r > kPovmTol) {
        throw Error(ErrorCode::InvalidArgument, "POVM elements sum to I only within " + std::to_string(r));
    }
}

double Povm::completeness_residual() const {
    CMatrix sum(dim(), dim());
    for (const auto& m : elements_) {
        sum += m;
    }
    return frobenius_norm(sum - CMatrix::identity(dim()));
}

std::optional<std::size_t> Povm::outcome_for(std::size_t state_index) const {
    for (std::size_t x = 0; x < labels_.size(); ++x) {
        if (labels_[x] == OutcomeLabel::identify(state_index)) {
            return x;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> Povm::inconclusive_outcome() const {
    for (std::size_t x = 0; x < labels_.size(); ++x) {
        if (!labels_[x].is_identify()) {
            return x;
        }
    }
    return std::nullopt;
}

double trace_product(const CMatrix& m, const CMatrix& rho) {
    if (!m.is_square() || m.rows() != rho.rows() || !rho.is_square()) {
        throw Error(ErrorCode::DimensionMismatch, "trace of product of mismatched operators");
    }
    Complex t{0.0, 0.0};
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            t += m(i, j) * rho(j, i);
        }
    }
    return t.real();
}

std::vector<double> outcome_probabilities(const Povm& p, const DensityMatrix& rho) {
    if (p.dim() != rho.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "POVM and state dimensions differ");
    }
    std::vector<double> probs;
    probs.reserve(p.size());
    for (const auto& m : p.elements()) {
        probs.push_back(clamp_probability(trace_product(m, rho.matrix())));
    }
    return probs;
}

DensityMatrix post_measurement_state(const Povm& p, std::size_t x, const DensityMatrix& rho) {
    if (x >= p.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "outcome index " + std::to_string(x));
    }
    if (p.dim() != rho.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "POVM and state dimensions differ");
    }
    const double px = trace_product(p.element(x), rho.matrix());
    if (px <= kZeroOutcome) {
        throw Error(ErrorCode::ZeroProbabilityOutcome, "outcome " + std::to_string(x) + " has probability " +
                                                           std::to_string(px));
    }
    const CMatrix a = principal_sqrt(p.element(x));
    CMatrix out = a * rho.matrix() * a.adjoint() * Complex{1.0 / px, 0.0};
    out = (out + out.adjoint()) * Complex{0.5, 0.0};
    return DensityMatrix(std::move(out));
}

ProbabilityTable confusion_matrix(const Ensemble& e, const Povm& p) {
    require_dims(e, p);
    ProbabilityTable table(e.size(), std::vector<double>(p.size(), 0.0));
    for (std::size_t i = 0; i < e.size(); ++i) {
        for (std::size_t x = 0; x < p.size(); ++x) {
            table[i][x] = clamp_probability(expectation(p.element(x), e.states[i]));
        }
    }
    return table;
}

double success_ambiguous(const Ensemble& e, const Povm& p) {
    require_dims(e, p);
    require_labels_in_range(e, p);
    const auto n_identify = std::count_if(p.labels().begin(), p.labels().end(),
                                          [](const OutcomeLabel& l) { return l.is_identify(); });
    if (static_cast<std::size_t>(n_identify) != e.size()) {
        throw Error(ErrorCode::LabelMismatch, "needs exactly one Identify outcome per state");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        const auto x = p.outcome_for(i);
        if (!x) {
            throw Error(ErrorCode::LabelMismatch, "state " + std::to_string(i) + " has no Identify outcome");
        }
        s += e.priors[i] * clamp_probability(expectation(p.element(*x), e.states[i]));
    }
    return clamp_probability(s);
}

double success_unambiguous(const Ensemble& e, const Povm& p) {
    require_dims(e, p);
    require_labels_in_range(e, p);
    const auto inconclusive = p.inconclusive_outcome();
    const auto n_inconclusive = std::count_if(p.labels().begin(), p.labels().end(),
                                              [](const OutcomeLabel& l) { return !l.is_identify(); });
    if (!inconclusive || n_inconclusive != 1) {
        throw Error(ErrorCode::LabelMismatch, "unambiguous measurement needs exactly one inconclusive outcome");
    }
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (!p.outcome_for(i)) {
            throw Error(ErrorCode::LabelMismatch, "state " + std::to_string(i) + " has no identifying outcome");
        }
    }
    const auto report = unambiguity_check(e, p);
    if (!report.unambiguous) {
        throw Error(ErrorCode::NotUnambiguous, "max violation " + std::to_string(report.max_violation));
    }
    double failure = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        failure += e.priors[i] * expectation(p.element(*inconclusive), e.states[i]);
    }
    return clamp_probability(1.0 - failure);
}

UnambiguityReport unambiguity_check(const Ensemble& e, const Povm& p, std::span<const std::size_t> outcomes) {
    require_dims(e, p);
    require_labels_in_range(e, p);
    std::vector<std::size_t> checked(outcomes.begin(), outcomes.end());
    if (checked.empty()) {
        for (std::size_t x = 0; x < p.size(); ++x) {
            if (p.label(x).is_identify()) {
                checked.push_back(x);
            }
        }
    }

    UnambiguityReport report;
    report.min_conclusive = 1.0;
    for (std::size_t x : checked) {
        const auto& label = p.label(x);
        if (!label.is_identify()) {
            throw Error(ErrorCode::LabelMismatch, "outcome " + std::to_string(x) + " is not an identification");
        }
        for (std::size_t i = 0; i < e.size(); ++i) {
            const double prob = expectation(p.element(x), e.states[i]);
            if (i == label.index) {
                report.min_conclusive = std::min(report.min_conclusive, prob);
            } else {
                report.max_cross = std::max(report.max_cross, std::abs(prob));
            }
        }
    }
    const double shortfall = std::max(0.0, kUnambiguityTol - report.min_conclusive);
    report.max_violation = std::max(report.max_cross > kUnambiguityTol ? report.max_cross : 0.0, shortfall);
    report.unambiguous = report.max_cross <= kUnambiguityTol && report.min_conclusive > kUnambiguityTol;
    return report;
}

} // namespace qsd
