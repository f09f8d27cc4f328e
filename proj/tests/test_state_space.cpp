#include "doctest.h"

#include <cmath>
#include <set>

#include "cloudq/error.hpp"
#include "cloudq/state_space.hpp"

using namespace cloudq;

namespace {

MassDistribution md(std::vector<std::uint32_t> v) { return MassDistribution(std::move(v)); }

}  // namespace

TEST_CASE("enumerate_states small cases") {
    auto s2 = enumerate_states(2);
    REQUIRE(s2.size() == 2);
    CHECK(s2[0] == md({2, 0}));
    CHECK(s2[1] == md({0, 1}));
    CHECK(enumerate_states(5).size() == 7);
    CHECK(enumerate_states(1).size() == 1);
}

TEST_CASE("enumerate_states at N=40 has p(40) entries") {
    auto states = enumerate_states(40);
    CHECK(states.size() == 37338);
    std::set<MassDistribution> unique(states.begin(), states.end());
    CHECK(unique.size() == states.size());
    CHECK(states.front() == MassDistribution::monodisperse(40));
    for (std::size_t k = 1; k < states.size(); ++k) CHECK_UNARY(states[k - 1] > states[k]);
}

TEST_CASE("enumerate_states respects the cap") {
    CHECK_THROWS_AS(enumerate_states(61), Error);
    try {
        enumerate_states(61);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::resource_limit);
    }
    CHECK(enumerate_states(10, 10).size() == 42);
}

TEST_CASE("partition counts") {
    CHECK(partition_count_exact(1) == 1);
    CHECK(partition_count_exact(5) == 7);
    CHECK(partition_count_exact(10) == 42);
    CHECK(partition_count_exact(30) == 5604);
    CHECK(partition_count_exact(40) == 37338);
    CHECK(partition_count_exact(100) == 190569292ULL);
}

TEST_CASE("enumeration length equals the partition count up to 30") {
    for (int n = 1; n <= 30; ++n) {
        CAPTURE(n);
        CHECK(enumerate_states(n).size() == partition_count_exact(n));
    }
}

TEST_CASE("asymptotic partition count") {
    // exp(pi sqrt(80/3)) / (160 sqrt 3) evaluated independently.
    CHECK(partition_count_asymptotic(40) == doctest::Approx(40080.08050347898).epsilon(1e-12));
    CHECK(partition_count_asymptotic(1) == doctest::Approx(std::exp(M_PI * std::sqrt(2.0 / 3.0)) / (4 * std::sqrt(3.0))));
    CHECK(partition_count_asymptotic(1) == doctest::Approx(1.88).epsilon(0.01));
    const double ratio = partition_count_asymptotic(40) / static_cast<double>(partition_count_exact(40));
    CHECK(ratio >= 0.9);
    CHECK(ratio <= 1.2);
}

TEST_CASE("transition table labels") {
    auto t3 = build_transition_table(3, KernelSpec::constant(1.0), 0.1);
    REQUIRE(t3.labels() == 2);
    CHECK(t3.pair(1) == BinPair{1, 1});
    CHECK(t3.pair(2) == BinPair{1, 2});
    CHECK(build_transition_table(40, KernelSpec::constant(1.0), 0.1).labels() == 400);
    auto t2 = build_transition_table(2, KernelSpec::constant(1.0), 0.1);
    REQUIRE(t2.labels() == 1);
    CHECK(t2.pair(1) == BinPair{1, 1});
    CHECK_THROWS_AS(build_transition_table(1, KernelSpec::constant(1.0), 0.1), Error);
}

TEST_CASE("label count matches the parity formula for N in [2, 400]") {
    for (int n = 2; n <= 400; ++n) {
        auto t = build_transition_table(n, KernelSpec::constant(1.0), 0.01);
        REQUIRE(t.labels() == label_count(n));
        const std::int64_t expected = n % 2 == 0 ? std::int64_t{n} * n / 4 : (std::int64_t{n} * n - 1) / 4;
        REQUIRE(t.labels() == expected);
    }
}

TEST_CASE("label and pair are inverse maps") {
    for (int n : {2, 3, 7, 12, 25}) {
        auto t = build_transition_table(n, KernelSpec::sum(0.5), 0.01);
        std::set<BinPair> seen;
        for (int h = 1; h <= t.labels(); ++h) {
            const BinPair p = t.pair(h);
            CHECK(p.i <= p.j);
            CHECK(p.i + p.j <= n);
            CHECK(t.label(p) == h);
            seen.insert(p);
            if (h > 1) CHECK(t.pair(h - 1) < p);
        }
        CHECK(seen.size() == static_cast<std::size_t>(t.labels()));
    }
}

TEST_CASE("transition rates") {
    auto t2 = build_transition_table(2, KernelSpec::constant(1.0), 0.1);
    CHECK(transition_rate(t2, md({2, 0}), 1) == doctest::Approx(0.1));
    CHECK(transition_rate(t2, md({0, 1}), 1) == 0.0);
    auto t3 = build_transition_table(3, KernelSpec::constant(1.0), 0.1);
    CHECK(transition_rate(t3, md({1, 1, 0}), 2) == doctest::Approx(0.1));
    CHECK(transition_rate(t3, md({1, 1, 0}), 1) == 0.0);
    CHECK_THROWS_AS(transition_rate(t3, md({1, 1, 0}), 3), Error);
    CHECK_THROWS_AS(transition_rate(t3, md({1, 1, 0}), 0), Error);
}

TEST_CASE("kernels") {
    CHECK(KernelSpec::constant(2.0)(3, 5) == 2.0);
    CHECK(KernelSpec::sum(0.5)(3, 5) == 4.0);
    CHECK(KernelSpec::product(0.5)(3, 5) == 7.5);
    KernelSpec table{KernelSpec::Kind::table, 1.0, {{1, 2, 0.25}}};
    CHECK(table(1, 2) == 0.25);
    CHECK(table(2, 1) == 0.25);
    CHECK(table(1, 1) == 0.0);
    CHECK_THROWS_AS(KernelSpec::constant(-1.0).validate(), Error);
    CHECK_THROWS_AS(KernelSpec::constant(std::nan("")).validate(), Error);
}

TEST_CASE("apply_transition") {
    CHECK(apply_transition(md({2, 0}), BinPair{1, 1}) == md({0, 1}));
    CHECK(apply_transition(md({6, 0, 0, 0, 0, 0}), BinPair{1, 1}) == md({4, 1, 0, 0, 0, 0}));
    CHECK(apply_transition(md({1, 1, 0}), BinPair{1, 2}) == md({0, 0, 1}));
    CHECK_THROWS_AS(apply_transition(md({1, 1, 0}), BinPair{1, 1}), Error);
    try {
        apply_transition(md({0, 1}), BinPair{1, 1});
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::infeasible_transition);
    }
}

TEST_CASE("mass distribution validation") {
    CHECK_THROWS_AS(md({1, 1}), Error);
    CHECK(md({1, 1, 0}).total_mass() == 3);
    CHECK_THROWS_AS(md({1, 0, 1}), Error);
    CHECK(MassDistribution::monodisperse(4).to_string() == "4 0 0 0");
}

TEST_CASE("property: transitions conserve mass and rates vanish exactly on empty sources") {
    for (int n = 2; n <= 14; ++n) {
        auto t = build_transition_table(n, KernelSpec::product(0.3), 0.001);
        for (const auto& s : enumerate_states(n)) {
            for (int h = 1; h <= t.labels(); ++h) {
                const BinPair p = t.pair(h);
                const double r = t.rate(s, h);
                CHECK(r >= 0.0);
                const bool feasible = transition_feasible(s, p);
                CHECK((r > 0.0) == feasible);
                if (feasible) CHECK(apply_transition(s, p).total_mass() == static_cast<std::uint64_t>(n));
            }
        }
    }
}
