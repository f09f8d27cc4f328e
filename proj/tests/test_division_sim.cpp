#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "cloudq/division_sim.hpp"
#include "cloudq/error.hpp"

using namespace cloudq;

namespace {

MassDistribution md(std::vector<std::uint32_t> v) { return MassDistribution(std::move(v)); }

double max_abs_diff(const ProbabilityTable& a, const ProbabilityTable& b) {
    double worst = 0.0;
    for (const auto& [s, p] : a.entries()) worst = std::max(worst, std::abs(p - b.probability(s)));
    for (const auto& [s, p] : b.entries()) worst = std::max(worst, std::abs(p - a.probability(s)));
    return worst;
}

}  // namespace

TEST_CASE("single division, N=2") {
    auto t = build_transition_table(2, KernelSpec::constant(1.0), 0.1);
    std::vector<HistoryBranch> root{{{}, MassDistribution::monodisperse(2), 1.0}};
    auto kids = divide_step(root, t, 1);
    REQUIRE(kids.size() == 2);
    for (const auto& k : kids) {
        REQUIRE(k.history.size() == 1);
        if (k.history[0] == 1) {
            CHECK(k.state == md({0, 1}));
            CHECK(k.prob == doctest::Approx(0.1).epsilon(1e-15));
        } else {
            CHECK(k.history[0] == 0);
            CHECK(k.state == md({2, 0}));
            CHECK(k.prob == doctest::Approx(0.9).epsilon(1e-15));
        }
    }
}

TEST_CASE("absorbing branch has a single child") {
    auto t = build_transition_table(4, KernelSpec::constant(1.0), 0.1);
    std::vector<HistoryBranch> root{{{}, md({0, 0, 0, 1}), 0.25}};
    auto kids = divide_step(root, t, 1);
    REQUIRE(kids.size() == 1);
    CHECK(kids[0].history == std::vector<int>{0});
    CHECK(kids[0].prob == 0.25);
}

TEST_CASE("children of a state match the direct transition rates") {
    auto t = build_transition_table(4, KernelSpec::constant(1.0), 0.02);
    for (const auto& s : {md({4, 0, 0, 0}), md({2, 1, 0, 0})}) {
        std::vector<HistoryBranch> root{{{}, s, 1.0}};
        auto kids = divide_step(root, t, 1);
        double r0 = 1.0;
        for (int h = 1; h <= t.labels(); ++h) r0 -= t.rate(s, h);
        for (const auto& k : kids) {
            const int h = k.history[0];
            const double expected = h == 0 ? r0 : t.rate(s, h);
            CHECK(k.prob == doctest::Approx(expected).epsilon(1e-14));
        }
    }
}

TEST_CASE("ledger identities") {
    auto t = build_transition_table(9, KernelSpec::sum(0.1), 0.004);
    for (const auto& s : enumerate_states(9)) {
        const auto l = division_ledger<double>(t, s);
        const int H = t.labels();
        REQUIRE(l.s.size() == static_cast<std::size_t>(H + 2));
        CHECK(l.s[H + 1] == 1.0);
        double tail = 0.0;
        for (int h = H; h >= 1; --h) {
            tail += l.r[h];
            CHECK(l.s[h] == doctest::Approx(1.0 - tail).epsilon(1e-14));
            CHECK(l.r_prime[h] >= 0.0);
            CHECK(l.r_prime[h] <= 1.0);
        }
        CHECK(l.s[1] == doctest::Approx(l.r[0]).epsilon(1e-14));
        const auto shares = divide_probability(l, 1.0);
        for (int h = 0; h <= H; ++h) CHECK(std::abs(shares[h] - l.r[h]) <= 1e-12);
    }
}

TEST_CASE("run modes") {
    auto t = build_transition_table(3, KernelSpec::constant(1.0), 0.02);
    auto zero = run_tree(t, 0);
    REQUIRE(zero.size() == 1);
    CHECK(zero[0].history.empty());
    CHECK(zero[0].prob == 1.0);

    auto merged = run_merged(t, 5);
    auto euler = evolve(ProbabilityTable::monodisperse(3), t, 5);
    CHECK(max_abs_diff(merged, euler) <= 1e-12);

    auto tree = run_tree(t, 2);
    auto exact_tree = marginalize(run_tree_exact(t, 2));
    auto exact_merged = run_merged_exact(t, 2);
    CHECK(exact_tree == exact_merged);
    CHECK(max_abs_diff(marginalize(tree, 3), run_merged(t, 2)) <= 1e-15);
}

TEST_CASE("branch cap points at merged mode") {
    auto t = build_transition_table(10, KernelSpec::constant(1.0), 0.001);
    try {
        run_tree(t, 6, 1000);
        FAIL("expected branch_cap");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::branch_cap);
        CHECK(std::string(e.what()).find("merged") != std::string::npos);
    }
}

TEST_CASE("divide_step preconditions") {
    auto t = build_transition_table(3, KernelSpec::constant(1.0), 0.02);
    std::vector<HistoryBranch> bad{{{0}, MassDistribution::monodisperse(3), 1.0}};
    CHECK_THROWS_AS(divide_step(bad, t, 1), Error);
    auto big = build_transition_table(10, KernelSpec::constant(1.0), 0.05);
    std::vector<HistoryBranch> root{{{}, MassDistribution::monodisperse(10), 1.0}};
    try {
        divide_step(root, big, 1);
        FAIL("expected step_size");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::step_size);
    }
}

TEST_CASE("amplitude readout") {
    auto t = build_transition_table(2, KernelSpec::constant(1.0), 0.1);
    auto p0 = ProbabilityTable::monodisperse(2);
    CHECK(amplitude_expectation(p0, 1) == 2.0);
    auto p1 = run_merged(t, 1);
    CHECK(occupancy_register_bits(2, 2) == 1);
    CHECK(readout_probability(p1, 2) == doctest::Approx(0.05).epsilon(1e-14));
    CHECK(amplitude_expectation(p1, 2) == doctest::Approx(0.1).epsilon(1e-14));
    auto tree = run_tree(t, 1);
    CHECK(amplitude_expectation(tree, 2) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(occupancy_register_bits(40, 1) == 6);
}

TEST_CASE("property: readout identity on random tables") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 11);
        const auto states = enumerate_states(n);
        ProbabilityTable::Entries e;
        double z = 0.0;
        for (const auto& s : states) z += (e[s] = u(rng));
        for (auto& [s, p] : e) p /= z;
        ProbabilityTable p(n, e);
        for (int i = 1; i <= n; ++i) CHECK(std::abs(amplitude_expectation(p, i) - expected_count(p, i)) <= 1e-12);
    }
}

TEST_CASE("history register replay") {
    for (int H : {1, 2, 4, 6, 9, 16, 25, 100, 400}) {
        for (int h = 0; h <= H; ++h) CHECK(replay_history_register(H, h) == h);
    }
    CHECK_THROWS_AS(replay_history_register(4, 5), Error);
}

TEST_CASE("label semantics check") {
    auto r2 = history_label_semantics_check(build_transition_table(2, KernelSpec::constant(1.0), 0.1), 1);
    CHECK(r2.ok());
    CHECK(r2.branches == 2);
    auto r4 = history_label_semantics_check(build_transition_table(4, KernelSpec::constant(1.0), 0.02), 1);
    CHECK(r4.ok());
    auto r4b = history_label_semantics_check(build_transition_table(4, KernelSpec::sum(0.1), 0.02), 2);
    CHECK(r4b.ok());
    CHECK(r4b.labels_checked == 2 * r4b.branches);
}

TEST_CASE("property: tree normalization and replay consistency") {
    for (int n : {3, 4, 5}) {
        auto t = build_transition_table(n, KernelSpec::product(0.1), 0.01);
        std::vector<HistoryBranch> b{{{}, MassDistribution::monodisperse(n), 1.0}};
        for (int m = 1; m <= 3; ++m) {
            b = divide_step(b, t, m);
            double total = 0.0;
            for (const auto& x : b) {
                CHECK(x.prob >= 0.0);
                CHECK(x.prob <= 1.0);
                total += x.prob;
                MassDistribution s = MassDistribution::monodisperse(n);
                for (int h : x.history)
                    if (h) s = apply_transition(t, s, h);
                CHECK(s == x.state);
            }
            CHECK(std::abs(total - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("branch CSV") {
    auto t = build_transition_table(2, KernelSpec::constant(1.0), 0.1);
    std::ostringstream out;
    write_branches_csv(out, run_tree(t, 2));
    const std::string s = out.str();
    CHECK(s.rfind("history,state,probability\n", 0) == 0);
    CHECK(s.find("1 0,0 1,") != std::string::npos);
}
