#include "cloudq/state_space.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cloudq/error.hpp"

namespace cloudq {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::config: return "config";
        case ErrorKind::resource_limit: return "resource-limit";
        case ErrorKind::empty_table: return "empty-table";
        case ErrorKind::label: return "label";
        case ErrorKind::infeasible_transition: return "infeasible-transition";
        case ErrorKind::step_size: return "step-size";
        case ErrorKind::branch_cap: return "branch-cap";
        case ErrorKind::range: return "range";
        case ErrorKind::division_by_zero: return "division-by-zero";
        case ErrorKind::overflow: return "overflow";
        case ErrorKind::degree_too_low: return "degree-too-low";
        case ErrorKind::domain: return "domain";
        case ErrorKind::unknown_primitive: return "unknown-primitive";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::config: return 2;
        case ErrorKind::resource_limit: return 3;
        case ErrorKind::empty_table: return 3;
        case ErrorKind::step_size: return 4;
        case ErrorKind::label: return 5;
        case ErrorKind::infeasible_transition: return 5;
        case ErrorKind::branch_cap: return 6;
        case ErrorKind::range: return 7;
        case ErrorKind::division_by_zero: return 7;
        case ErrorKind::overflow: return 7;
        case ErrorKind::domain: return 7;
        case ErrorKind::degree_too_low: return 8;
        case ErrorKind::unknown_primitive: return 9;
        case ErrorKind::io: return 10;
    }
    return 1;
}

MassDistribution::MassDistribution(std::vector<std::uint32_t> counts) : counts_(std::move(counts)) {
    if (counts_.empty()) throw Error(ErrorKind::range, "mass distribution needs at least one bin");
    if (total_mass() != counts_.size()) {
        throw Error(ErrorKind::range, "mass distribution " + to_string() + " has total mass " +
                                          std::to_string(total_mass()) + ", expected " +
                                          std::to_string(counts_.size()));
    }
}

MassDistribution apply_counts_unchecked(std::vector<std::uint32_t> counts) {
    MassDistribution m;
    m.counts_ = std::move(counts);
    return m;
}

MassDistribution MassDistribution::monodisperse(int bins) {
    if (bins < 1) throw Error(ErrorKind::range, "bin count must be positive");
    std::vector<std::uint32_t> c(static_cast<std::size_t>(bins), 0);
    c[0] = static_cast<std::uint32_t>(bins);
    return apply_counts_unchecked(std::move(c));
}

std::uint64_t MassDistribution::total_mass() const noexcept {
    std::uint64_t m = 0;
    for (std::size_t k = 0; k < counts_.size(); ++k) m += (k + 1) * counts_[k];
    return m;
}

std::string MassDistribution::to_string() const {
    std::string s;
    for (std::size_t k = 0; k < counts_.size(); ++k) {
        if (k) s += ' ';
        s += std::to_string(counts_[k]);
    }
    return s;
}

namespace {

void descend(int bin, int remaining, std::vector<std::uint32_t>& counts,
             std::vector<MassDistribution>& out) {
    const int bins = static_cast<int>(counts.size());
    if (remaining == 0) {
        out.push_back(apply_counts_unchecked(counts));
        return;
    }
    if (bin > bins || bin > remaining) return;
    for (int k = remaining / bin; k >= 0; --k) {
        counts[static_cast<std::size_t>(bin - 1)] = static_cast<std::uint32_t>(k);
        descend(bin + 1, remaining - k * bin, counts, out);
    }
    counts[static_cast<std::size_t>(bin - 1)] = 0;
}

}  // namespace

std::vector<MassDistribution> enumerate_states(int bins, int cap) {
    if (bins < 1) throw Error(ErrorKind::range, "enumerate_states: N must be >= 1");
    if (bins > cap) {
        throw Error(ErrorKind::resource_limit,
                    "enumerate_states: N=" + std::to_string(bins) + " exceeds cap " +
                        std::to_string(cap) + " (p(N)=" +
                        std::to_string(partition_count_exact(bins)) + " states)");
    }
    std::vector<MassDistribution> out;
    out.reserve(partition_count_exact(bins));
    std::vector<std::uint32_t> counts(static_cast<std::size_t>(bins), 0);
    descend(1, bins, counts, out);
    return out;
}

std::uint64_t partition_count_exact(int n) {
    if (n < 0) throw Error(ErrorKind::range, "partition_count_exact: negative argument");
    std::vector<std::uint64_t> p(static_cast<std::size_t>(n) + 1, 0);
    p[0] = 1;
    for (int part = 1; part <= n; ++part) {
        for (int total = part; total <= n; ++total) {
            std::uint64_t add = p[static_cast<std::size_t>(total - part)];
            std::uint64_t& slot = p[static_cast<std::size_t>(total)];
            if (slot > UINT64_MAX - add) {
                throw Error(ErrorKind::overflow,
                            "partition_count_exact: p(" + std::to_string(n) + ") exceeds 64 bits");
            }
            slot += add;
        }
    }
    return p[static_cast<std::size_t>(n)];
}

double partition_count_asymptotic(int n) {
    if (n < 1) throw Error(ErrorKind::range, "partition_count_asymptotic: N must be >= 1");
    const double nn = n;
    return std::exp(std::numbers::pi * std::sqrt(2.0 * nn / 3.0)) / (4.0 * nn * std::sqrt(3.0));
}

double KernelSpec::operator()(int i, int j) const {
    switch (kind) {
        case Kind::constant: return k0;
        case Kind::sum: return k0 * (i + j);
        case Kind::product: return k0 * i * j;
        case Kind::table: {
            if (i > j) std::swap(i, j);
            for (const auto& [a, b, k] : entries) {
                if (std::min(a, b) == i && std::max(a, b) == j) return k;
            }
            return 0.0;
        }
    }
    return 0.0;
}

void KernelSpec::validate() const {
    if (!std::isfinite(k0) || k0 < 0) throw Error(ErrorKind::config, "kernel: k0 must be finite and >= 0");
    for (const auto& [i, j, k] : entries) {
        if (i < 1 || j < 1) throw Error(ErrorKind::config, "kernel: table bins must be >= 1");
        if (!std::isfinite(k) || k < 0) {
            throw Error(ErrorKind::config, "kernel: table value for (" + std::to_string(i) + "," +
                                               std::to_string(j) + ") must be finite and >= 0");
        }
    }
}

const char* to_string(KernelSpec::Kind kind) noexcept {
    switch (kind) {
        case KernelSpec::Kind::constant: return "constant";
        case KernelSpec::Kind::sum: return "sum";
        case KernelSpec::Kind::product: return "product";
        case KernelSpec::Kind::table: return "table";
    }
    return "constant";
}

KernelSpec::Kind kernel_kind_from_string(const std::string& name) {
    if (name == "constant") return KernelSpec::Kind::constant;
    if (name == "sum") return KernelSpec::Kind::sum;
    if (name == "product") return KernelSpec::Kind::product;
    if (name == "table") return KernelSpec::Kind::table;
    throw Error(ErrorKind::config, "unknown kernel kind '" + name + "'");
}

TransitionTable::TransitionTable(int bins, const KernelSpec& kernel, double dt)
    : bins_(bins), dt_(dt), kernel_(kernel) {
    if (bins < 2) {
        throw Error(ErrorKind::empty_table,
                    "transition table: N=" + std::to_string(bins) + " admits no collisions");
    }
    if (!(dt > 0) || !std::isfinite(dt)) throw Error(ErrorKind::range, "transition table: dt must be > 0");
    kernel.validate();
    for (int i = 1; 2 * i <= bins; ++i) {
        for (int j = i; i + j <= bins; ++j) {
            BinPair p{i, j};
            label_of_.emplace(p, static_cast<int>(pairs_.size()) + 1);
            pairs_.push_back(p);
            kernel_values_.push_back(kernel(i, j));
        }
    }
}

BinPair TransitionTable::pair(int label) const {
    if (label < 1 || label > labels()) {
        throw Error(ErrorKind::label, "label " + std::to_string(label) + " outside [1, " +
                                          std::to_string(labels()) + "]");
    }
    return pairs_[static_cast<std::size_t>(label - 1)];
}

int TransitionTable::label(BinPair pair) const {
    if (pair.i > pair.j) std::swap(pair.i, pair.j);
    auto it = label_of_.find(pair);
    if (it == label_of_.end()) {
        throw Error(ErrorKind::label, "no label for bin pair (" + std::to_string(pair.i) + "," +
                                          std::to_string(pair.j) + ")");
    }
    return it->second;
}

double TransitionTable::kernel(int label) const {
    pair(label);
    return kernel_values_[static_cast<std::size_t>(label - 1)];
}

double TransitionTable::rate(const MassDistribution& state, int label) const {
    const BinPair p = pair(label);
    const double k = kernel_values_[static_cast<std::size_t>(label - 1)];
    const double ni = state.n(p.i);
    if (p.equal()) return 0.5 * k * ni * (ni - (ni > 0 ? 1.0 : 0.0)) * dt_;
    return k * ni * state.n(p.j) * dt_;
}

double TransitionTable::total_rate(const MassDistribution& state) const {
    double total = 0.0;
    for (int h = 1; h <= labels(); ++h) total += rate(state, h);
    return total;
}

TransitionTable build_transition_table(int bins, const KernelSpec& kernel, double dt) {
    return TransitionTable(bins, kernel, dt);
}

double transition_rate(const TransitionTable& table, const MassDistribution& state, int label) {
    return table.rate(state, label);
}

bool transition_feasible(const MassDistribution& state, BinPair p) {
    if (p.i < 1 || p.j < 1 || p.i + p.j > state.bins()) return false;
    if (p.equal()) return state.n(p.i) >= 2;
    return state.n(p.i) >= 1 && state.n(p.j) >= 1;
}

MassDistribution apply_transition(const MassDistribution& state, BinPair p) {
    if (!transition_feasible(state, p)) {
        throw Error(ErrorKind::infeasible_transition,
                    "cannot collide bins (" + std::to_string(p.i) + "," + std::to_string(p.j) +
                        ") in state (" + state.to_string() + ")");
    }
    std::vector<std::uint32_t> c(state.counts().begin(), state.counts().end());
    c[static_cast<std::size_t>(p.i - 1)] -= 1;
    c[static_cast<std::size_t>(p.j - 1)] -= 1;
    c[static_cast<std::size_t>(p.i + p.j - 1)] += 1;
    return apply_counts_unchecked(std::move(c));
}

MassDistribution apply_transition(const TransitionTable& table, const MassDistribution& state,
                                  int label) {
    return apply_transition(state, table.pair(label));
}

}  // namespace cloudq
