#include "qsd/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <numeric>
#include <sstream>
#include <thread>

#include "qsd/error.hpp"

namespace qsd {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::vector<std::vector<std::uint64_t>> run_shard(const std::vector<double>& priors, const ProbabilityTable& table,
                                                   std::uint64_t trials, std::uint64_t seed, std::uint64_t shard) {
    std::vector<std::vector<std::uint64_t>> counts(table.size(), std::vector<std::uint64_t>(table.front().size(), 0));
    CounterRng rng(seed, shard);
    for (std::uint64_t t = 0; t < trials; ++t) {
        const std::size_t i = sample_index(priors, rng.uniform());
        const std::size_t x = sample_index(table[i], rng.uniform());
        ++counts[i][x];
    }
    return counts;
}
} // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(splitmix64(splitmix64(seed) + stream)) {}

std::uint64_t CounterRng::splitmix64(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t CounterRng::next() { return splitmix64(key_ + kGolden * counter_++); }

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t sample_index(std::span<const double> weights, double u) {
    double total = 0.0;
    for (double w : weights) {
        total += std::max(w, 0.0);
    }
    if (!(total > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "cannot sample from all-zero weights");
    }
    const double target = u * total;
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const double w = std::max(weights[k], 0.0);
        if (w > 0.0) {
            last_positive = k;
        }
        cum += w;
        if (target < cum) {
            return k;
        }
    }
    return last_positive;
}

double brute_force_success(const Scheme& s) {
    double total = 0.0;
    for (std::size_t i = 0; i < s.ensemble.size(); ++i) {
        const auto x = s.povm.outcome_for(i);
        if (!x) {
            continue;
        }
        const CVector joint = extend_with_ancilla(s.ensemble.states[i], s.ancilla_dim, 0).amplitudes();
        const Ket coupled = Ket::normalized(s.coupling.apply(joint));
        const auto probs = outcome_probabilities(s.povm, DensityMatrix::pure(coupled));
        total += s.ensemble.priors[i] * probs[*x];
    }
    return total;
}

SimResult simulate(const Scheme& s, std::uint64_t n, std::uint64_t seed) {
    if (n == 0) {
        throw Error(ErrorCode::InvalidArgument, "simulation needs at least one trial");
    }
    const ProbabilityTable table = confusion_matrix(s.coupled_ensemble(), s.povm);
    const std::uint64_t shards = (n + kTrialsPerShard - 1) / kTrialsPerShard;

    std::vector<std::future<std::vector<std::vector<std::uint64_t>>>> jobs;
    jobs.reserve(shards);
    for (std::uint64_t k = 0; k < shards; ++k) {
        const std::uint64_t trials = std::min(kTrialsPerShard, n - k * kTrialsPerShard);
        jobs.push_back(std::async(std::launch::async, run_shard, std::cref(s.ensemble.priors), std::cref(table),
                                  trials, seed, k));
    }

    SimResult r;
    r.n = n;
    r.seed = seed;
    r.counts.assign(table.size(), std::vector<std::uint64_t>(table.front().size(), 0));
    for (auto& job : jobs) {
        const auto part = job.get();
        for (std::size_t i = 0; i < part.size(); ++i) {
            for (std::size_t x = 0; x < part[i].size(); ++x) {
                r.counts[i][x] += part[i][x];
            }
        }
    }
    std::uint64_t hits = 0;
    for (std::size_t i = 0; i < r.counts.size(); ++i) {
        if (const auto x = s.povm.outcome_for(i)) {
            hits += r.counts[i][*x];
        }
    }
    r.empirical_success = static_cast<double>(hits) / static_cast<double>(n);
    r.std_error = std::sqrt(r.empirical_success * (1.0 - r.empirical_success) / static_cast<double>(n));
    return r;
}

std::vector<double> GridRange::values() const {
    if (!(step > 0.0) || !std::isfinite(min) || !std::isfinite(max) || max < min) {
        throw Error(ErrorCode::InvalidArgument, "grid needs finite min <= max and step > 0");
    }
    const auto n = static_cast<long>(std::floor((max - min) / step + 1e-9));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    for (long k = 0; k <= n; ++k) {
        out.push_back(min + static_cast<double>(k) * step);
    }
    return out;
}

GridRange GridRange::parse(const std::string& text) {
    std::istringstream in(text);
    GridRange g{};
    char c1 = 0;
    char c2 = 0;
    if (!(in >> g.min >> c1 >> g.max >> c2 >> g.step) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof()) {
        throw Error(ErrorCode::InvalidArgument, "grid must look like min:max:step, got '" + text + "'");
    }
    g.values();
    return g;
}

std::vector<std::array<double, 3>> simplex_grid(double step) {
    if (!(step > 0.0) || step > 1.0) {
        throw Error(ErrorCode::InvalidArgument, "simplex step must lie in (0, 1]");
    }
    const auto n = static_cast<int>(std::lround(1.0 / step));
    if (std::abs(n * step - 1.0) > 1e-9) {
        throw Error(ErrorCode::InvalidArgument, "simplex step must divide 1");
    }
    std::vector<std::array<double, 3>> out;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; i + j <= n; ++j) {
            const int k = n - i - j;
            out.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n, static_cast<double>(k) / n});
        }
    }
    return out;
}

SweepKind parse_sweep_kind(const std::string& id) {
    if (id == "theorem21" || id == "2.1") {
        return SweepKind::Theorem21;
    }
    if (id == "theorem31" || id == "3.1") {
        return SweepKind::Theorem31;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown sweep '" + id + "'");
}

SweepResult sweep(SweepKind kind, std::span<const double> gammas, std::span<const std::array<double, 3>> priors,
                  bool hypothesis_only) {
    if (gammas.empty() || priors.empty()) {
        throw Error(ErrorCode::EmptyGrid, "sweep needs at least one gamma and one prior triple");
    }
    auto one_gamma = [&](double gamma) {
        SweepResult part;
        for (const auto& p : priors) {
            if (kind == SweepKind::Theorem21 && hypothesis_only && p[2] < 1.0 / 3.0 - 1e-12) {
                continue;
            }
            try {
                part.records.push_back(kind == SweepKind::Theorem21 ? theorem21_check(gamma, p)
                                                                   : theorem31_check(gamma, p));
            } catch (const Error&) {
                ++part.skipped;
            }
        }
        return part;
    };

    std::vector<SweepResult> parts(gammas.size());
    std::atomic<std::size_t> next{0};
    const std::size_t workers =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, gammas.size());
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < gammas.size(); i = next++) {
                    parts[i] = one_gamma(gammas[i]);
                }
            });
        }
    }
    SweepResult out;
    for (auto& part : parts) {
        out.skipped += part.skipped;
        out.records.insert(out.records.end(), part.records.begin(), part.records.end());
    }
    return out;
}

} // namespace qsd
