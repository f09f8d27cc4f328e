#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "cloudq/state_space.hpp"

namespace cloudq {

// One time slice P(.; t) of the master equation, keyed by occupation vector.
// Entries are never pruned, so tiny probabilities stay in the sums.
class ProbabilityTable {
public:
    using Entries = std::map<MassDistribution, double>;

    ProbabilityTable() = default;
    ProbabilityTable(int bins, Entries entries, std::int64_t step = 0);

    // P(monodisperse) = 1 at step 0.
    static ProbabilityTable monodisperse(int bins);

    int bins() const noexcept { return bins_; }
    std::int64_t step() const noexcept { return step_; }
    const Entries& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }

    double probability(const MassDistribution& state) const;
    double total() const;

private:
    int bins_ = 0;
    Entries entries_;
    std::int64_t step_ = 0;
};

// Explicit-Euler update of the discretized master equation, written in the
// gain/loss form: every target state pulls probability from its donor states.
// Throws Error(step_size) naming the worst state when some state has
// sum_h r_h > 1.
ProbabilityTable euler_step(const ProbabilityTable& p, const TransitionTable& table);

ProbabilityTable evolve(const ProbabilityTable& p0, const TransitionTable& table, std::int64_t steps);

// P(n_bin = value).
double marginal(const ProbabilityTable& p, int bin, std::uint32_t value);

// <n_bin> = sum_n n P(n_bin = n).
double expected_count(const ProbabilityTable& p, int bin);

void check_step_size(const TransitionTable& table, const ProbabilityTable& p);

struct SsaConfig {
    std::int64_t runs = 1000;
    std::uint64_t seed = 0;
    double t_end = 1.0;
};

struct SsaEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

// Gillespie direct-method estimate of <n_bin> at t_end, starting from the
// monodisperse state. Propensity of label h is r_h / dt. Trajectory k draws
// from its own stream derived from (seed, k), so results do not depend on
// CLOUDQ_THREADS.
SsaEstimate ssa_estimate(const TransitionTable& table, const SsaConfig& cfg, int bin);

// Same trajectories, every bin at once (index 0 is bin 1).
std::vector<SsaEstimate> ssa_estimate_all(const TransitionTable& table, const SsaConfig& cfg);

}  // namespace cloudq
