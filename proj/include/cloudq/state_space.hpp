#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace cloudq {

// Occupation vector (n_1, ..., n_N) of droplets per mass bin. Bin i holds
// droplets of mass i * x_1, and the total mass sum_i i * n_i equals N.
class MassDistribution {
public:
    MassDistribution() = default;

    // Validates mass conservation; throws Error(range) otherwise.
    explicit MassDistribution(std::vector<std::uint32_t> counts);

    // All N units of mass in bin 1.
    static MassDistribution monodisperse(int bins);

    int bins() const noexcept { return static_cast<int>(counts_.size()); }

    // 1-based bin access.
    std::uint32_t n(int bin) const { return counts_.at(static_cast<std::size_t>(bin - 1)); }

    std::span<const std::uint32_t> counts() const noexcept { return counts_; }

    std::uint64_t total_mass() const noexcept;

    // "n_1 n_2 ... n_N"
    std::string to_string() const;

    auto operator<=>(const MassDistribution&) const = default;
    bool operator==(const MassDistribution&) const = default;

private:
    friend MassDistribution apply_counts_unchecked(std::vector<std::uint32_t> counts);
    std::vector<std::uint32_t> counts_;
};

inline constexpr int kDefaultStateCap = 60;

// All integer partitions of N as occupation vectors, in descending
// lexicographic order of the counts (the monodisperse state comes first).
std::vector<MassDistribution> enumerate_states(int bins, int cap = kDefaultStateCap);

// p(N) via the coin-change recurrence. Throws Error(overflow) past 64 bits.
std::uint64_t partition_count_exact(int n);

// Hardy-Ramanujan leading term exp(pi sqrt(2N/3)) / (4 N sqrt 3).
double partition_count_asymptotic(int n);

struct KernelSpec {
    enum class Kind { constant, sum, product, table };

    Kind kind = Kind::constant;
    double k0 = 1.0;
    // (i, j, K) with i <= j; only used by Kind::table, missing pairs are 0.
    std::vector<std::tuple<int, int, double>> entries;

    static KernelSpec constant(double k0) { return {Kind::constant, k0, {}}; }
    static KernelSpec sum(double k0) { return {Kind::sum, k0, {}}; }
    static KernelSpec product(double k0) { return {Kind::product, k0, {}}; }

    double operator()(int i, int j) const;
    void validate() const;
};

const char* to_string(KernelSpec::Kind kind) noexcept;
KernelSpec::Kind kernel_kind_from_string(const std::string& name);

struct BinPair {
    int i = 0;
    int j = 0;
    bool equal() const noexcept { return i == j; }
    auto operator<=>(const BinPair&) const = default;
};

// Bijection between labels h = 1..H and colliding bin pairs (i <= j, i + j <= N),
// in lexicographic (i, j) order. Label 0 means "no transition".
class TransitionTable {
public:
    TransitionTable(int bins, const KernelSpec& kernel, double dt);

    int bins() const noexcept { return bins_; }
    int labels() const noexcept { return static_cast<int>(pairs_.size()); }
    double dt() const noexcept { return dt_; }
    const KernelSpec& kernel_spec() const noexcept { return kernel_; }

    BinPair pair(int label) const;
    int label(BinPair pair) const;
    double kernel(int label) const;
    std::span<const BinPair> pairs() const noexcept { return pairs_; }

    // r_h(state): K n_i n_j dt, or K n_i (n_i - 1) dt / 2 on the diagonal.
    double rate(const MassDistribution& state, int label) const;

    // Sum over all labels of rate(state, h).
    double total_rate(const MassDistribution& state) const;

private:
    int bins_;
    double dt_;
    KernelSpec kernel_;
    std::vector<BinPair> pairs_;
    std::vector<double> kernel_values_;
    std::map<BinPair, int> label_of_;
};

TransitionTable build_transition_table(int bins, const KernelSpec& kernel, double dt);

// Closed form: N^2/4 for even N, (N^2 - 1)/4 for odd N.
constexpr std::int64_t label_count(std::int64_t bins) {
    return bins % 2 == 0 ? bins * bins / 4 : (bins * bins - 1) / 4;
}

double transition_rate(const TransitionTable& table, const MassDistribution& state, int label);

bool transition_feasible(const MassDistribution& state, BinPair pair);

// Post-collision state. Throws Error(infeasible_transition) when a source bin
// is under-populated.
MassDistribution apply_transition(const MassDistribution& state, BinPair pair);
MassDistribution apply_transition(const TransitionTable& table, const MassDistribution& state,
                                  int label);

}  // namespace cloudq
