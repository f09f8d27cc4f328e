#include "cloudq/master_solver.hpp"

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "cloudq/error.hpp"
#include "cloudq/parallel.hpp"

namespace cloudq {

ProbabilityTable::ProbabilityTable(int bins, Entries entries, std::int64_t step)
    : bins_(bins), entries_(std::move(entries)), step_(step) {
    for (const auto& [state, prob] : entries_) {
        if (state.bins() != bins) throw Error(ErrorKind::range, "probability table: bin count mismatch");
        if (!(prob >= 0.0) || prob > 1.0 + 1e-12) {
            throw Error(ErrorKind::range, "probability table: probability out of [0,1] for state (" +
                                              state.to_string() + ")");
        }
    }
}

ProbabilityTable ProbabilityTable::monodisperse(int bins) {
    return ProbabilityTable(bins, {{MassDistribution::monodisperse(bins), 1.0}}, 0);
}

double ProbabilityTable::probability(const MassDistribution& state) const {
    auto it = entries_.find(state);
    return it == entries_.end() ? 0.0 : it->second;
}

double ProbabilityTable::total() const {
    double t = 0.0;
    for (const auto& [state, prob] : entries_) t += prob;
    return t;
}

void check_step_size(const TransitionTable& table, const ProbabilityTable& p) {
    double worst = -1.0;
    const MassDistribution* worst_state = nullptr;
    for (const auto& [state, prob] : p.entries()) {
        double total = table.total_rate(state);
        if (total > worst) {
            worst = total;
            worst_state = &state;
        }
    }
    if (worst > 1.0) {
        std::ostringstream msg;
        msg << "step size too large: sum_h r_h = " << worst << " > 1 in state ("
            << worst_state->to_string() << "); reduce dt";
        throw Error(ErrorKind::step_size, msg.str());
    }
}

namespace {

// Donor of `target` under pair (i, j): the state that becomes `target` after
// the collision. Returns false when target has no droplet in bin i + j.
bool donor_of(const MassDistribution& target, BinPair p, std::vector<std::uint32_t>& donor) {
    if (target.n(p.i + p.j) == 0) return false;
    donor.assign(target.counts().begin(), target.counts().end());
    donor[static_cast<std::size_t>(p.i - 1)] += 1;
    donor[static_cast<std::size_t>(p.j - 1)] += 1;
    donor[static_cast<std::size_t>(p.i + p.j - 1)] -= 1;
    return true;
}

}  // namespace

ProbabilityTable euler_step(const ProbabilityTable& p, const TransitionTable& table) {
    if (p.bins() != table.bins()) throw Error(ErrorKind::range, "euler_step: bin count mismatch");
    check_step_size(table, p);

    // Targets: every present state and everything reachable from it in one step.
    std::set<MassDistribution> targets;
    for (const auto& [state, prob] : p.entries()) {
        targets.insert(state);
        for (int h = 1; h <= table.labels(); ++h) {
            if (transition_feasible(state, table.pair(h))) targets.insert(apply_transition(table, state, h));
        }
    }

    const double dt = table.dt();
    ProbabilityTable::Entries next;
    std::vector<std::uint32_t> donor;
    for (const auto& target : targets) {
        const double here = p.probability(target);
        double gain = 0.0;
        double loss = 0.0;
        for (int h = 1; h <= table.labels(); ++h) {
            const BinPair pr = table.pair(h);
            const double k = table.kernel(h);
            const double ni = target.n(pr.i);
            if (pr.equal()) {
                loss += 0.5 * k * ni * (ni > 0 ? ni - 1.0 : 0.0) * here;
            } else {
                loss += k * ni * target.n(pr.j) * here;
            }
            if (!donor_of(target, pr, donor)) continue;
            const double from = p.probability(MassDistribution(donor));
            if (from == 0.0) continue;
            if (pr.equal()) {
                gain += 0.5 * k * (ni + 2.0) * (ni + 1.0) * from;
            } else {
                gain += k * (ni + 1.0) * (target.n(pr.j) + 1.0) * from;
            }
        }
        double value = here + dt * gain - dt * loss;
        if (value < 0.0 && value > -1e-15) value = 0.0;
        next.emplace(target, value);
    }
    return ProbabilityTable(p.bins(), std::move(next), p.step() + 1);
}

ProbabilityTable evolve(const ProbabilityTable& p0, const TransitionTable& table, std::int64_t steps) {
    if (steps < 0) throw Error(ErrorKind::range, "evolve: negative step count");
    ProbabilityTable p = p0;
    for (std::int64_t m = 0; m < steps; ++m) p = euler_step(p, table);
    return p;
}

double marginal(const ProbabilityTable& p, int bin, std::uint32_t value) {
    if (bin < 1 || bin > p.bins()) {
        throw Error(ErrorKind::range, "marginal: bin " + std::to_string(bin) + " outside [1, " +
                                          std::to_string(p.bins()) + "]");
    }
    double sum = 0.0;
    for (const auto& [state, prob] : p.entries()) {
        if (state.n(bin) == value) sum += prob;
    }
    return sum;
}

double expected_count(const ProbabilityTable& p, int bin) {
    if (bin < 1 || bin > p.bins()) {
        throw Error(ErrorKind::range, "expected_count: bin " + std::to_string(bin) + " outside [1, " +
                                          std::to_string(p.bins()) + "]");
    }
    // Group by value so the sum follows sum_n n P(n_i = n).
    std::map<std::uint32_t, double> by_value;
    for (const auto& [state, prob] : p.entries()) by_value[state.n(bin)] += prob;
    double e = 0.0;
    for (const auto& [value, prob] : by_value) e += value * prob;
    return e;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double unit_open(std::mt19937_64& rng) {
    // (0, 1], 53-bit resolution.
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

MassDistribution trajectory(const TransitionTable& table, double t_end, std::mt19937_64& rng) {
    MassDistribution state = MassDistribution::monodisperse(table.bins());
    std::vector<double> propensity(static_cast<std::size_t>(table.labels()));
    double t = 0.0;
    for (;;) {
        double total = 0.0;
        for (int h = 1; h <= table.labels(); ++h) {
            double a = table.rate(state, h) / table.dt();
            propensity[static_cast<std::size_t>(h - 1)] = a;
            total += a;
        }
        if (total <= 0.0) break;
        t += -std::log(unit_open(rng)) / total;
        if (t > t_end) break;
        double pick = unit_open(rng) * total;
        int chosen = 0;
        for (int h = 1; h <= table.labels(); ++h) {
            double a = propensity[static_cast<std::size_t>(h - 1)];
            if (a <= 0.0) continue;
            chosen = h;
            pick -= a;
            if (pick <= 0.0) break;
        }
        state = apply_transition(table, state, chosen);
    }
    return state;
}

}  // namespace

std::vector<SsaEstimate> ssa_estimate_all(const TransitionTable& table, const SsaConfig& cfg) {
    if (cfg.runs < 2) throw Error(ErrorKind::config, "ssa: runs must be >= 2");
    if (!(cfg.t_end >= 0.0) || !std::isfinite(cfg.t_end)) throw Error(ErrorKind::config, "ssa: t_end must be >= 0");

    const auto runs = static_cast<std::size_t>(cfg.runs);
    std::vector<MassDistribution> finals(runs);
    parallel_for(runs, [&](std::size_t k) {
        std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(k)));
        finals[k] = trajectory(table, cfg.t_end, rng);
    });

    const int bins = table.bins();
    std::vector<SsaEstimate> out(static_cast<std::size_t>(bins));
    for (int b = 1; b <= bins; ++b) {
        double mean = 0.0;
        for (const auto& s : finals) mean += s.n(b);
        mean /= static_cast<double>(runs);
        double var = 0.0;
        for (const auto& s : finals) {
            double d = s.n(b) - mean;
            var += d * d;
        }
        var /= static_cast<double>(runs - 1);
        out[static_cast<std::size_t>(b - 1)] = {mean, std::sqrt(var / static_cast<double>(runs))};
    }
    return out;
}

SsaEstimate ssa_estimate(const TransitionTable& table, const SsaConfig& cfg, int bin) {
    if (bin < 1 || bin > table.bins()) throw Error(ErrorKind::range, "ssa: bin out of range");
    return ssa_estimate_all(table, cfg)[static_cast<std::size_t>(bin - 1)];
}

}  // namespace cloudq
