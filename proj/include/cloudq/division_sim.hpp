#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cloudq/master_solver.hpp"
#include "cloudq/state_space.hpp"

namespace cloudq {

using ExactReal = boost::multiprecision::cpp_rational;

// One path of the history register: the labels fired at steps 1..m, the
// resulting mass distribution and the squared amplitude of the path.
template <class Real>
struct BasicHistoryBranch {
    std::vector<int> history;
    MassDistribution state;
    Real prob{};
};

using HistoryBranch = BasicHistoryBranch<double>;
using ExactHistoryBranch = BasicHistoryBranch<ExactReal>;

// r, s and r' for one state. r[0..H] with r[0] the no-transition probability,
// s[1..H+1] with s[H+1] = 1, r_prime[1..H]; index 0 of s and r_prime is unused.
template <class Real>
struct BasicDivisionLedger {
    std::vector<Real> r;
    std::vector<Real> s;
    std::vector<Real> r_prime;
};

using DivisionLedger = BasicDivisionLedger<double>;

template <class Real>
BasicDivisionLedger<Real> division_ledger(const TransitionTable& table, const MassDistribution& state);

// Splits `prob` over labels H..1 and 0 by the descending sequential division.
// Entry h of the result is the share of label h.
template <class Real>
std::vector<Real> divide_probability(const BasicDivisionLedger<Real>& ledger, const Real& prob);

// Splits every branch (history length step - 1) into its children. Children
// with exactly zero probability are dropped.
template <class Real>
std::vector<BasicHistoryBranch<Real>> divide_step(const std::vector<BasicHistoryBranch<Real>>& branches,
                                                  const TransitionTable& table, int step);

inline constexpr std::uint64_t kDefaultBranchCap = 1'000'000;

// Full history tree after M steps. Throws Error(branch_cap) when (H+1)^M
// exceeds `branch_cap`.
std::vector<HistoryBranch> run_tree(const TransitionTable& table, int steps,
                                    std::uint64_t branch_cap = kDefaultBranchCap);

// Histories summed out after every step.
ProbabilityTable run_merged(const TransitionTable& table, int steps);

// Exact rational versions of the two modes; rates are taken from the binary
// values of K and dt without rounding.
std::vector<ExactHistoryBranch> run_tree_exact(const TransitionTable& table, int steps,
                                               std::uint64_t branch_cap = kDefaultBranchCap);
std::map<MassDistribution, ExactReal> run_merged_exact(const TransitionTable& table, int steps);

ProbabilityTable marginalize(const std::vector<HistoryBranch>& branches, int bins);
std::map<MassDistribution, ExactReal> marginalize(const std::vector<ExactHistoryBranch>& branches);

// Register width q_i = ceil(log2(floor(N / i) + 1)) holding n_i.
int occupancy_register_bits(int bins, int bin);

// P(|0>_D) after encoding n_i / 2^{q_i} into the readout qubit.
double readout_probability(const ProbabilityTable& p, int bin);
double readout_probability(const std::vector<HistoryBranch>& branches, int bin);

// 2^{q_i} * P(|0>_D), which recovers <n_i>.
double amplitude_expectation(const ProbabilityTable& p, int bin);
double amplitude_expectation(const std::vector<HistoryBranch>& branches, int bin);

// Value the history register ends with for one step when the branch split off
// at division `label` (0 = never split), replaying the increment-if-nonzero
// update between consecutive divisions.
int replay_history_register(int labels, int label);

struct LabelCheckReport {
    std::size_t branches = 0;
    std::size_t labels_checked = 0;
    std::size_t label_mismatches = 0;
    std::size_t replay_mismatches = 0;
    bool ok() const noexcept { return label_mismatches == 0 && replay_mismatches == 0; }
};

LabelCheckReport history_label_semantics_check(const TransitionTable& table, int steps,
                                               std::uint64_t branch_cap = kDefaultBranchCap);

// history,state,probability
void write_branches_csv(std::ostream& out, const std::vector<HistoryBranch>& branches);

}  // namespace cloudq
