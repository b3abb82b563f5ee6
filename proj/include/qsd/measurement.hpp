#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsd/linalg.hpp"
#include "qsd/states.hpp"

namespace qsd {

/// What an outcome claims about the prepared state.
struct OutcomeLabel {
    enum class Kind { Identify, Inconclusive };

    Kind kind = Kind::Inconclusive;
    std::size_t index = 0; // meaningful for Identify only

    static OutcomeLabel identify(std::size_t i) { return {Kind::Identify, i}; }
    static OutcomeLabel inconclusive() { return {Kind::Inconclusive, 0}; }

    bool is_identify() const noexcept { return kind == Kind::Identify; }
    /// "identify:<i>" or "inconclusive"
    std::string to_string() const;
    static OutcomeLabel parse(const std::string& text);

    friend bool operator==(const OutcomeLabel&, const OutcomeLabel&) = default;
};

/// Positive operators summing to the identity, one label per element.
class Povm {
public:
    Povm(std::vector<CMatrix> elements, std::vector<OutcomeLabel> labels);

    std::size_t dim() const noexcept { return elements_.front().rows(); }
    std::size_t size() const noexcept { return elements_.size(); }
    const std::vector<CMatrix>& elements() const noexcept { return elements_; }
    const std::vector<OutcomeLabel>& labels() const noexcept { return labels_; }
    const CMatrix& element(std::size_t x) const { return elements_.at(x); }
    const OutcomeLabel& label(std::size_t x) const { return labels_.at(x); }

    /// ||sum_x M_x - I||_F
    double completeness_residual() const;
    /// Index of the outcome labeled Identify(i), if any.
    std::optional<std::size_t> outcome_for(std::size_t state_index) const;
    std::optional<std::size_t> inconclusive_outcome() const;

private:
    std::vector<CMatrix> elements_;
    std::vector<OutcomeLabel> labels_;
};

/// Row i holds P(outcome x | state i).
using ProbabilityTable = std::vector<std::vector<double>>;

/// Tr(M rho) for Hermitian M, rho.
double trace_product(const CMatrix& m, const CMatrix& rho);

/// p_x = Tr(M_x rho), clamped to [0, 1].
std::vector<double> outcome_probabilities(const Povm& p, const DensityMatrix& rho);

/// rho_x = A_x rho A_x^dagger / p_x with A_x = sqrt(M_x).
DensityMatrix post_measurement_state(const Povm& p, std::size_t x, const DensityMatrix& rho);

ProbabilityTable confusion_matrix(const Ensemble& e, const Povm& p);

/// sum_i p_i Tr(M_i rho_i) for a POVM with exactly one Identify outcome per
/// state. Inconclusive outcomes are allowed and count as failures.
double success_ambiguous(const Ensemble& e, const Povm& p);

/// 1 - sum_i p_i Tr(M_0 rho_i); requires a passing unambiguity_check.
double success_unambiguous(const Ensemble& e, const Povm& p);

struct UnambiguityReport {
    bool unambiguous = false;
    double max_cross = 0.0;       // max_{i != j} Tr(M_j rho_i)
    double min_conclusive = 0.0;  // min_i Tr(M_i rho_i) over checked outcomes
    double max_violation = 0.0;   // max_cross, or the shortfall of min_conclusive
};

/// Checks Tr(M_j rho_i) = 0 for i != j and Tr(M_i rho_i) > 0 over the
/// Identify outcomes listed in `outcomes` (all Identify outcomes when empty).
UnambiguityReport unambiguity_check(const Ensemble& e, const Povm& p,
                                    std::span<const std::size_t> outcomes = {});

} // namespace qsd
