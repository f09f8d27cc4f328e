#include "doctest.h"

#include <cmath>
#include <sstream>

#include "cloudq/csv_export.hpp"
#include "cloudq/error.hpp"
#include "cloudq/master_solver.hpp"

using namespace cloudq;

namespace {

MassDistribution md(std::vector<std::uint32_t> v) { return MassDistribution(std::move(v)); }

double mass_of(const ProbabilityTable& p) {
    double m = 0.0;
    for (int i = 1; i <= p.bins(); ++i) m += i * expected_count(p, i);
    return m;
}

}  // namespace

TEST_CASE("two-state chain, one step") {
    auto t = build_transition_table(2, KernelSpec::constant(1.0), 0.1);
    auto p = euler_step(ProbabilityTable::monodisperse(2), t);
    CHECK(p.probability(md({2, 0})) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(p.probability(md({0, 1})) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(p.step() == 1);
    CHECK(marginal(p, 1, 2) == doctest::Approx(0.9));
    CHECK(expected_count(p, 1) == doctest::Approx(2 * (1 - 0.1)));
}

TEST_CASE("absorbing state is stationary") {
    auto t = build_transition_table(5, KernelSpec::constant(1.0), 0.05);
    ProbabilityTable p(5, {{md({0, 0, 0, 0, 1}), 1.0}});
    auto q = evolve(p, t, 10);
    CHECK(q.size() == 1);
    CHECK(q.probability(md({0, 0, 0, 0, 1})) == 1.0);
}

TEST_CASE("N=3 two steps against the hand expansion") {
    // k = K0 dt = 0.05. From (3,0,0): r(1,1) = 3k. From (1,1,0): r(1,2) = k.
    const double k = 0.05;
    auto t = build_transition_table(3, KernelSpec::constant(1.0), k);
    auto p = evolve(ProbabilityTable::monodisperse(3), t, 2);
    const double a = (1 - 3 * k) * (1 - 3 * k);
    const double b = 3 * k * (1 - 3 * k) + 3 * k * (1 - k);
    const double c = 3 * k * k;
    CHECK(p.probability(md({3, 0, 0})) == doctest::Approx(a).epsilon(1e-14));
    CHECK(p.probability(md({1, 1, 0})) == doctest::Approx(b).epsilon(1e-14));
    CHECK(p.probability(md({0, 0, 1})) == doctest::Approx(c).epsilon(1e-14));
    CHECK(marginal(p, 1, 1) == doctest::Approx(p.probability(md({1, 1, 0}))));
}

TEST_CASE("frozen oracle: independent push-form Euler in exact rationals") {
    SUBCASE("N=3, K0 dt = 1/100, M=5") {
        auto p = evolve(ProbabilityTable::monodisperse(3), build_transition_table(3, KernelSpec::constant(1.0), 0.01), 5);
        CHECK(p.probability(md({3, 0, 0})) == doctest::Approx(0.8587340257).epsilon(1e-12));
        CHECK(p.probability(md({1, 1, 0})) == doctest::Approx(0.1383840363).epsilon(1e-12));
        CHECK(p.probability(md({0, 0, 1})) == doctest::Approx(0.002881938).epsilon(1e-12));
        CHECK(expected_count(p, 1) == doctest::Approx(2.7145861134).epsilon(1e-12));
    }
    SUBCASE("N=4, K0 dt = 1/50, M=3") {
        auto p = evolve(ProbabilityTable::monodisperse(4), build_transition_table(4, KernelSpec::constant(1.0), 0.02), 3);
        CHECK(p.probability(md({4, 0, 0, 0})) == doctest::Approx(0.681472).epsilon(1e-12));
        CHECK(p.probability(md({2, 1, 0, 0})) == doctest::Approx(0.298224).epsilon(1e-12));
        CHECK(p.probability(md({1, 0, 1, 0})) == doctest::Approx(0.01344).epsilon(1e-12));
        CHECK(p.probability(md({0, 2, 0, 0})) == doctest::Approx(0.00672).epsilon(1e-12));
        CHECK(p.probability(md({0, 0, 0, 1})) == doctest::Approx(0.000144).epsilon(1e-12));
    }
    SUBCASE("N=6, K0 dt = 1/64, M=4") {
        auto p = evolve(ProbabilityTable::monodisperse(6), build_transition_table(6, KernelSpec::constant(1.0), 1.0 / 64), 4);
        CHECK(p.probability(md({4, 1, 0, 0, 0, 0})) == doctest::Approx(0.48963814973831177).epsilon(1e-13));
        CHECK(p.probability(md({1, 1, 1, 0, 0, 0})) == doctest::Approx(0.007145404815673828).epsilon(1e-13));
        CHECK(p.probability(md({0, 0, 2, 0, 0, 0})) == doctest::Approx(3.218650817871094e-05).epsilon(1e-12));
        const double expected[] = {4.405800461769104, 0.6860402226448059, 0.06908297538757324,
                                   0.003637075424194336, 6.437301635742188e-05, 0.0};
        for (int i = 1; i <= 6; ++i) CHECK(expected_count(p, i) == doctest::Approx(expected[i - 1]).epsilon(1e-13));
    }
}

TEST_CASE("evolve basics") {
    auto t = build_transition_table(2, KernelSpec::constant(1.0), 0.03);
    auto p0 = ProbabilityTable::monodisperse(2);
    CHECK(evolve(p0, t, 0).entries() == p0.entries());
    for (int m : {1, 5, 40}) {
        auto p = evolve(p0, t, m);
        CHECK(p.probability(md({0, 1})) == doctest::Approx(1 - std::pow(1 - 0.03, m)).epsilon(1e-13));
    }
    auto t5 = build_transition_table(5, KernelSpec::constant(1.0), 0.05);
    auto late = evolve(ProbabilityTable::monodisperse(5), t5, 4000);
    CHECK(late.probability(md({0, 0, 0, 0, 1})) > 0.999);
}

TEST_CASE("initial expectation and normalization of marginals") {
    auto p = ProbabilityTable::monodisperse(7);
    CHECK(expected_count(p, 1) == 7.0);
    auto q = evolve(p, build_transition_table(7, KernelSpec::sum(0.2), 0.01), 12);
    for (int i = 1; i <= 7; ++i) {
        double s = 0.0;
        for (std::uint32_t n = 0; n <= static_cast<std::uint32_t>(7 / i); ++n) s += marginal(q, i, n);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK_THROWS_AS(marginal(q, 8, 0), Error);
    CHECK_THROWS_AS(expected_count(q, 0), Error);
}

TEST_CASE("step-size precondition is enforced") {
    auto t = build_transition_table(10, KernelSpec::constant(1.0), 0.05);  // 45 * 0.05 > 1
    try {
        euler_step(ProbabilityTable::monodisperse(10), t);
        FAIL("expected step_size error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::step_size);
        CHECK(std::string(e.what()).find("10 0 0") != std::string::npos);
    }
}

TEST_CASE("property: conservation and monotone absorption") {
    for (int n : {4, 6, 9}) {
        auto t = build_transition_table(n, KernelSpec::product(0.02), 0.05);
        auto p = ProbabilityTable::monodisperse(n);
        std::vector<std::uint32_t> top(static_cast<std::size_t>(n), 0);
        top.back() = 1;
        const MassDistribution absorbed(top);
        double prev = 0.0;
        for (int m = 0; m < 60; ++m) {
            p = euler_step(p, t);
            CHECK(std::abs(p.total() - 1.0) <= 1e-12);
            CHECK(std::abs(mass_of(p) - n) <= 1e-9);
            const double a = p.probability(absorbed);
            CHECK(a >= prev);
            prev = a;
            for (const auto& [s, v] : p.entries()) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0 + 1e-12);
            }
        }
    }
}

TEST_CASE("property: first-order convergence in dt for N=6") {
    const double t_end = 1.0;
    auto n1_at = [&](double dt) {
        auto t = build_transition_table(6, KernelSpec::constant(1.0), dt);
        const auto steps = static_cast<std::int64_t>(std::llround(t_end / dt));
        return expected_count(evolve(ProbabilityTable::monodisperse(6), t, steps), 1);
    };
    const double dt = 0.02;
    const double ref = n1_at(dt / 8);
    const double e1 = std::abs(n1_at(dt) - ref);
    const double e2 = std::abs(n1_at(dt / 2) - ref);
    const double ratio = e1 / e2;
    CHECK(ratio >= 1.5);
    CHECK(ratio <= 2.5);
}

TEST_CASE("SSA basics") {
    SUBCASE("zero kernel leaves the initial state") {
        auto t = build_transition_table(5, KernelSpec::constant(0.0), 0.1);
        auto est = ssa_estimate(t, SsaConfig{100, 3, 1.0}, 1);
        CHECK(est.mean == 5.0);
        CHECK(est.std_error == 0.0);
    }
    SUBCASE("two-state chain against 1 - exp(-1)") {
        auto t = build_transition_table(2, KernelSpec::constant(1.0), 0.01);
        auto est = ssa_estimate(t, SsaConfig{10000, 11, 1.0}, 2);
        CHECK(std::abs(est.mean - (1 - std::exp(-1.0))) <= 3 * est.std_error);
    }
    SUBCASE("deterministic under a fixed seed") {
        auto t = build_transition_table(6, KernelSpec::sum(0.3), 0.01);
        auto a = ssa_estimate_all(t, SsaConfig{500, 99, 0.7});
        auto b = ssa_estimate_all(t, SsaConfig{500, 99, 0.7});
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].mean == b[i].mean);
            CHECK(a[i].std_error == b[i].std_error);
        }
    }
    SUBCASE("fewer than two runs is rejected") {
        auto t = build_transition_table(3, KernelSpec::constant(1.0), 0.01);
        CHECK_THROWS_AS(ssa_estimate(t, SsaConfig{1, 0, 1.0}, 1), Error);
    }
}

TEST_CASE("property: SSA agrees with Euler for small N") {
    for (int n : {4, 8, 12}) {
        const double dt = 1e-3;
        auto t = build_transition_table(n, KernelSpec::constant(1.0), dt);
        auto p = evolve(ProbabilityTable::monodisperse(n), t, 500);
        auto est = ssa_estimate_all(t, SsaConfig{4000, 2024, 0.5});
        for (int i = 1; i <= n; ++i) {
            CAPTURE(n);
            CAPTURE(i);
            const double euler = expected_count(p, i);
            if (est[i - 1].std_error > 0.0) {
                CHECK(std::abs(est[i - 1].mean - euler) <= 3 * est[i - 1].std_error);
            } else {
                // No trajectory populated the bin: the mean must sit below the
                // rule-of-three detection limit.
                CHECK(euler <= 3.0 / 4000);
            }
        }
    }
}

TEST_CASE("CSV export schemas") {
    auto t = build_transition_table(2, KernelSpec::constant(1.0), 0.1);
    std::vector<ProbabilityTable> series{ProbabilityTable::monodisperse(2)};
    series.push_back(euler_step(series.back(), t));
    std::ostringstream a, b;
    write_expected_counts_csv(a, series);
    write_probabilities_csv(b, series);
    CHECK(a.str().rfind("step,bin,expected_count\n", 0) == 0);
    CHECK(b.str().rfind("step,state_id,probability\n", 0) == 0);
    CHECK(b.str().find("1,0 1,") != std::string::npos);
    CHECK(a.str().find('\r') == std::string::npos);
}

TEST_CASE("probability table validation") {
    CHECK_THROWS_AS(ProbabilityTable(2, {{md({2, 0}), 1.5}}), Error);
    CHECK_THROWS_AS(ProbabilityTable(2, {{md({2, 0}), -0.1}}), Error);
}
