#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qsd/analysis.hpp"
#include "qsd/schemes.hpp"

namespace qsd {

/// Counter-based generator: the k-th draw of stream (seed, shard) is
///   splitmix64(key + k * 0x9E3779B97F4A7C15),  key = splitmix64(splitmix64(seed) + shard)
/// where splitmix64 is Steele/Lea/Flood's finalizer (increment
/// 0x9E3779B97F4A7C15, multipliers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB,
/// shifts 30/27/31). Uniform doubles take the top 53 bits.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next();
    /// Uniform in [0, 1).
    double uniform();

    static std::uint64_t splitmix64(std::uint64_t z);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Trials handled by one generator stream.
inline constexpr std::uint64_t kTrialsPerShard = 1u << 16;

struct SimResult {
    std::uint64_t n = 0;
    std::vector<std::vector<std::uint64_t>> counts; // [state][outcome]
    double empirical_success = 0.0;
    double std_error = 0.0;
    std::uint64_t seed = 0;

    friend bool operator==(const SimResult&, const SimResult&) = default;
};

/// sum_i p_i Tr(M_{Identify(i)} U(|u_i><u_i| (x) |0_a><0_a|)U^dagger), computed
/// from the scheme's states, coupling and POVM only.
double brute_force_success(const Scheme& s);

/// Draws a state from the priors and an outcome from its exact outcome
/// distribution, n times. Deterministic in (scheme, n, seed); shards run in
/// parallel and are merged by summation.
SimResult simulate(const Scheme& s, std::uint64_t n, std::uint64_t seed);

/// Index k with cdf[k-1] <= u < cdf[k] over clamped, renormalized weights.
std::size_t sample_index(std::span<const double> weights, double u);

/// Inclusive arithmetic grid min, min + step, ..., max.
struct GridRange {
    double min;
    double max;
    double step;

    std::vector<double> values() const;
    /// "min:max:step"
    static GridRange parse(const std::string& text);
};

/// All (p0, p1, p2) on the lattice of the given step summing to 1.
std::vector<std::array<double, 3>> simplex_grid(double step);

enum class SweepKind { Theorem21, Theorem31 };

/// "theorem21" / "2.1" or "theorem31" / "3.1".
SweepKind parse_sweep_kind(const std::string& id);

struct SweepResult {
    std::vector<ComparisonRecord> records; // gamma-major, then priors order
    std::size_t skipped = 0;               // out-of-domain points
};

/// One record per valid (gamma, priors) point. With `hypothesis_only`, the
/// Theorem21 sweep skips priors with p_2 < 1/3.
SweepResult sweep(SweepKind kind, std::span<const double> gammas, std::span<const std::array<double, 3>> priors,
                  bool hypothesis_only = true);

} // namespace qsd
