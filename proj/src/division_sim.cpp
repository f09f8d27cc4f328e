#include "cloudq/division_sim.hpp"

#include <algorithm>
#include <bit>
#include <iomanip>
#include <sstream>
#include <type_traits>

#include "cloudq/error.hpp"
#include "cloudq/parallel.hpp"

namespace cloudq {

namespace {

template <class Real>
Real rate_as(const TransitionTable& table, const MassDistribution& state, int label) {
    if constexpr (std::is_same_v<Real, double>) {
        return table.rate(state, label);
    } else {
        const BinPair p = table.pair(label);
        const Real k = Real(table.kernel(label)) * Real(table.dt());
        const std::uint32_t ni = state.n(p.i);
        if (p.equal()) return ni < 2 ? Real(0) : k * ni * (ni - 1) / 2;
        return k * ni * state.n(p.j);
    }
}

void require_step_size(const TransitionTable& table, const MassDistribution& state) {
    const double total = table.total_rate(state);
    if (total > 1.0) {
        std::ostringstream msg;
        msg << "step size too large: sum_h r_h = " << total << " > 1 in state (" << state.to_string()
            << "); reduce dt";
        throw Error(ErrorKind::step_size, msg.str());
    }
}

template <class Real>
std::vector<BasicHistoryBranch<Real>> children_of(const BasicHistoryBranch<Real>& parent,
                                                  const TransitionTable& table) {
    require_step_size(table, parent.state);
    const auto ledger = division_ledger<Real>(table, parent.state);
    const auto shares = divide_probability(ledger, parent.prob);
    std::vector<BasicHistoryBranch<Real>> out;
    for (int h = 0; h <= table.labels(); ++h) {
        const Real& share = shares[static_cast<std::size_t>(h)];
        if (share == 0) continue;
        BasicHistoryBranch<Real> child;
        child.history = parent.history;
        child.history.push_back(h);
        child.state = h == 0 ? parent.state : apply_transition(table, parent.state, h);
        child.prob = share;
        out.push_back(std::move(child));
    }
    return out;
}

std::uint64_t tree_size_bound(int labels, int steps) {
    std::uint64_t total = 1;
    const auto factor = static_cast<std::uint64_t>(labels) + 1;
    for (int m = 0; m < steps; ++m) {
        if (total > UINT64_MAX / factor) return UINT64_MAX;
        total *= factor;
    }
    return total;
}

template <class Real>
std::vector<BasicHistoryBranch<Real>> run_tree_impl(const TransitionTable& table, int steps,
                                                    std::uint64_t branch_cap) {
    if (steps < 0) throw Error(ErrorKind::range, "run: negative step count");
    const std::uint64_t bound = tree_size_bound(table.labels(), steps);
    if (bound > branch_cap) {
        throw Error(ErrorKind::branch_cap,
                    "tree mode may create (H+1)^M = " +
                        (bound == UINT64_MAX ? std::string("> 2^64") : std::to_string(bound)) +
                        " branches, above the cap of " + std::to_string(branch_cap) +
                        "; use merged mode");
    }
    std::vector<BasicHistoryBranch<Real>> branches(1);
    branches[0].state = MassDistribution::monodisperse(table.bins());
    branches[0].prob = Real(1);
    for (int m = 1; m <= steps; ++m) branches = divide_step(branches, table, m);
    return branches;
}

template <class Real>
std::map<MassDistribution, Real> run_merged_impl(const TransitionTable& table, int steps) {
    if (steps < 0) throw Error(ErrorKind::range, "run: negative step count");
    std::map<MassDistribution, Real> current;
    current.emplace(MassDistribution::monodisperse(table.bins()), Real(1));
    for (int m = 1; m <= steps; ++m) {
        std::map<MassDistribution, Real> next;
        for (const auto& [state, prob] : current) {
            require_step_size(table, state);
            const auto shares = divide_probability(division_ledger<Real>(table, state), prob);
            for (int h = 0; h <= table.labels(); ++h) {
                const Real& share = shares[static_cast<std::size_t>(h)];
                if (share == 0) continue;
                const MassDistribution target = h == 0 ? state : apply_transition(table, state, h);
                next[target] += share;
            }
        }
        current = std::move(next);
    }
    return current;
}

void check_bin(int bins, int bin) {
    if (bin < 1 || bin > bins) {
        throw Error(ErrorKind::range,
                    "bin " + std::to_string(bin) + " outside [1, " + std::to_string(bins) + "]");
    }
}

}  // namespace

template <class Real>
BasicDivisionLedger<Real> division_ledger(const TransitionTable& table, const MassDistribution& state) {
    const int labels = table.labels();
    const auto size = static_cast<std::size_t>(labels);
    BasicDivisionLedger<Real> ledger;
    ledger.r.assign(size + 1, Real(0));
    ledger.s.assign(size + 2, Real(0));
    ledger.r_prime.assign(size + 1, Real(0));
    ledger.s[size + 1] = Real(1);
    for (int h = labels; h >= 1; --h) {
        const auto k = static_cast<std::size_t>(h);
        ledger.r[k] = rate_as<Real>(table, state, h);
        ledger.s[k] = ledger.s[k + 1] - ledger.r[k];
        if (ledger.s[k + 1] > 0) {
            Real rp = ledger.r[k] / ledger.s[k + 1];
            if (rp > 1) rp = Real(1);
            ledger.r_prime[k] = rp;
        }
    }
    ledger.r[0] = ledger.s[1];
    return ledger;
}

template <class Real>
std::vector<Real> divide_probability(const BasicDivisionLedger<Real>& ledger, const Real& prob) {
    const std::size_t labels = ledger.r_prime.size() - 1;
    std::vector<Real> shares(labels + 1, Real(0));
    Real remaining = prob;
    for (std::size_t h = labels; h >= 1; --h) {
        shares[h] = remaining * ledger.r_prime[h];
        remaining = remaining * (1 - ledger.r_prime[h]);
    }
    shares[0] = remaining;
    return shares;
}

template <class Real>
std::vector<BasicHistoryBranch<Real>> divide_step(const std::vector<BasicHistoryBranch<Real>>& branches,
                                                  const TransitionTable& table, int step) {
    for (const auto& b : branches) {
        if (static_cast<int>(b.history.size()) != step - 1) {
            throw Error(ErrorKind::range, "divide_step: branch history length " +
                                              std::to_string(b.history.size()) + " does not match step " +
                                              std::to_string(step));
        }
    }
    std::vector<std::vector<BasicHistoryBranch<Real>>> parts(branches.size());
    parallel_for(branches.size(), [&](std::size_t k) { parts[k] = children_of(branches[k], table); });
    std::vector<BasicHistoryBranch<Real>> out;
    for (auto& part : parts) {
        for (auto& child : part) out.push_back(std::move(child));
    }
    return out;
}

template DivisionLedger division_ledger<double>(const TransitionTable&, const MassDistribution&);
template BasicDivisionLedger<ExactReal> division_ledger<ExactReal>(const TransitionTable&,
                                                                   const MassDistribution&);
template std::vector<double> divide_probability<double>(const DivisionLedger&, const double&);
template std::vector<ExactReal> divide_probability<ExactReal>(const BasicDivisionLedger<ExactReal>&,
                                                              const ExactReal&);
template std::vector<HistoryBranch> divide_step<double>(const std::vector<HistoryBranch>&,
                                                        const TransitionTable&, int);
template std::vector<ExactHistoryBranch> divide_step<ExactReal>(const std::vector<ExactHistoryBranch>&,
                                                                const TransitionTable&, int);

std::vector<HistoryBranch> run_tree(const TransitionTable& table, int steps, std::uint64_t branch_cap) {
    return run_tree_impl<double>(table, steps, branch_cap);
}

ProbabilityTable run_merged(const TransitionTable& table, int steps) {
    auto merged = run_merged_impl<double>(table, steps);
    return ProbabilityTable(table.bins(), ProbabilityTable::Entries(merged.begin(), merged.end()), steps);
}

std::vector<ExactHistoryBranch> run_tree_exact(const TransitionTable& table, int steps,
                                               std::uint64_t branch_cap) {
    return run_tree_impl<ExactReal>(table, steps, branch_cap);
}

std::map<MassDistribution, ExactReal> run_merged_exact(const TransitionTable& table, int steps) {
    return run_merged_impl<ExactReal>(table, steps);
}

ProbabilityTable marginalize(const std::vector<HistoryBranch>& branches, int bins) {
    ProbabilityTable::Entries entries;
    std::int64_t step = 0;
    for (const auto& b : branches) {
        entries[b.state] += b.prob;
        step = static_cast<std::int64_t>(b.history.size());
    }
    return ProbabilityTable(bins, std::move(entries), step);
}

std::map<MassDistribution, ExactReal> marginalize(const std::vector<ExactHistoryBranch>& branches) {
    std::map<MassDistribution, ExactReal> out;
    for (const auto& b : branches) out[b.state] += b.prob;
    return out;
}

int occupancy_register_bits(int bins, int bin) {
    check_bin(bins, bin);
    return std::bit_width(static_cast<unsigned>(bins / bin));
}

double readout_probability(const ProbabilityTable& p, int bin) {
    const double d = std::ldexp(1.0, occupancy_register_bits(p.bins(), bin));
    double sum = 0.0;
    for (const auto& [state, prob] : p.entries()) sum += state.n(bin) / d * prob;
    return sum;
}

double readout_probability(const std::vector<HistoryBranch>& branches, int bin) {
    if (branches.empty()) return 0.0;
    const int bins = branches.front().state.bins();
    const double d = std::ldexp(1.0, occupancy_register_bits(bins, bin));
    double sum = 0.0;
    for (const auto& b : branches) sum += b.state.n(bin) / d * b.prob;
    return sum;
}

double amplitude_expectation(const ProbabilityTable& p, int bin) {
    return std::ldexp(readout_probability(p, bin), occupancy_register_bits(p.bins(), bin));
}

double amplitude_expectation(const std::vector<HistoryBranch>& branches, int bin) {
    if (branches.empty()) return 0.0;
    const int bins = branches.front().state.bins();
    return std::ldexp(readout_probability(branches, bin), occupancy_register_bits(bins, bin));
}

int replay_history_register(int labels, int label) {
    if (labels < 1) throw Error(ErrorKind::empty_table, "history register needs at least one label");
    if (label < 0 || label > labels) {
        throw Error(ErrorKind::label,
                    "label " + std::to_string(label) + " outside [0, " + std::to_string(labels) + "]");
    }
    const unsigned mask = (1u << std::bit_width(static_cast<unsigned>(labels))) - 1u;
    unsigned reg = 0;
    for (int h = labels; h >= 1; --h) {
        // The division rotates the target qubit only on the still-undivided part,
        // whose register is 0.
        if (h == label) reg ^= 1u;
        if (h > 1) {
            reg = (reg + 1u) & mask;
            if ((reg >> 1) == 0 && (reg & 1u)) reg ^= 1u;
        }
    }
    return static_cast<int>(reg);
}

LabelCheckReport history_label_semantics_check(const TransitionTable& table, int steps,
                                               std::uint64_t branch_cap) {
    const auto branches = run_tree(table, steps, branch_cap);
    LabelCheckReport report;
    report.branches = branches.size();
    const MassDistribution initial = MassDistribution::monodisperse(table.bins());
    for (const auto& b : branches) {
        MassDistribution replayed = initial;
        for (int label : b.history) {
            ++report.labels_checked;
            if (replay_history_register(table.labels(), label) != label) ++report.label_mismatches;
            if (label != 0) replayed = apply_transition(table, replayed, label);
        }
        if (!(replayed == b.state)) ++report.replay_mismatches;
    }
    return report;
}

void write_branches_csv(std::ostream& out, const std::vector<HistoryBranch>& branches) {
    out << "history,state,probability\n";
    out << std::setprecision(17);
    for (const auto& b : branches) {
        for (std::size_t k = 0; k < b.history.size(); ++k) out << (k ? " " : "") << b.history[k];
        out << ',' << b.state.to_string() << ',' << b.prob << '\n';
    }
}

}  // namespace cloudq
