#include "doctest.h"

#include <string>

#include "cloudq/config.hpp"
#include "cloudq/error.hpp"

using namespace cloudq;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::config);
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("empty input lists the required fields") {
    const std::string msg = error_of("  \n");
    CHECK(msg.find("required fields") != std::string::npos);
    CHECK(msg.find("n_eps") != std::string::npos);
    CHECK(msg.find("preset") != std::string::npos);
}

TEST_CASE("unknown keys and bad types are rejected with their path") {
    CHECK(error_of(R"({"command": "estimate", "bogus": 1})").find("config.bogus") != std::string::npos);
    CHECK(error_of(R"({"kernel": {"kind": "constant", "k1": 2}})").find("config.kernel.k1") != std::string::npos);
    CHECK(error_of(R"({"N": "forty"})").find("config.N") != std::string::npos);
    CHECK(error_of(R"({"command": "dance"})").find("config.command") != std::string::npos);
    CHECK(error_of(R"({"format": "xml"})").find("config.format") != std::string::npos);
    CHECK(error_of("[1, 2]").find("top level") != std::string::npos);
    CHECK(error_of("{").find("malformed") != std::string::npos);
}

TEST_CASE("full parse") {
    const auto c = parse_config_text(R"({
        "command": "simulate", "N": 6, "M": 4, "dt": 0.01, "seed": 7, "mode": "tree",
        "kernel": {"kind": "table", "entries": [[1, 1, 0.5], [1, 2, 0.25]]},
        "format": "csv", "check_master": true, "runs": 100
    })");
    CHECK(*c.command == Command::simulate);
    CHECK(*c.N == 6);
    CHECK(*c.M == 4);
    CHECK(*c.dt == 0.01);
    CHECK(*c.seed == 7);
    CHECK(*c.mode == SimMode::tree);
    CHECK(c.kernel->kind == KernelSpec::Kind::table);
    CHECK((*c.kernel)(1, 2) == 0.25);
    CHECK(*c.format == OutputFormat::csv);
    CHECK(*c.check_master);
    CHECK(*c.runs == 100);
}

TEST_CASE("presets through the config layer") {
    RunConfig cfg;
    cfg.preset = "paper-case-1";
    const auto c = to_estimation_case(cfg);
    CHECK(c.N == 40);
    CHECK(c.M == 2000);
    CHECK(c.n_eps == 42);
    CHECK(c.d_eps == 5);
    CHECK(c.M_eps == 15);
    CHECK(c.eps_rotation == 1e-13);
    CHECK(c.eps_estimation == 9.9e-3);
    CHECK(c.eps_c == 1e-8);
    CHECK(c.delta == 0.01);
    cfg.preset = "paper-case-4";
    const auto c4 = to_estimation_case(cfg);
    CHECK(c4.M == 20000);
    CHECK(c4.eps_c == 1e-9);
    cfg.M = 10;
    CHECK(to_estimation_case(cfg).M == 10);
}

TEST_CASE("explicit cases need every field") {
    RunConfig cfg;
    cfg.N = 40;
    cfg.M = 2000;
    try {
        to_estimation_case(cfg);
        FAIL("expected config error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::config);
        CHECK(std::string(e.what()).find("n_eps") != std::string::npos);
        CHECK(std::string(e.what()).find("eps_c") != std::string::npos);
    }
    cfg = parse_config_text(R"({"N": 40, "M": 2000, "n_eps": 42, "d_eps": 5, "M_eps": 15,
                                "eps_rotation": 1e-13, "eps_estimation": 9.9e-3, "eps_c": 1e-8})");
    const auto c = to_estimation_case(cfg);
    CHECK(c.eps_arcsin == 1e-12);
    cfg.eps_c = 2.0;
    CHECK_THROWS_AS(to_estimation_case(cfg), Error);
}

TEST_CASE("merge lets the second source win") {
    RunConfig file;
    file.N = 10;
    file.M = 5;
    RunConfig flags;
    flags.M = 7;
    const auto m = merge(file, flags);
    CHECK(*m.N == 10);
    CHECK(*m.M == 7);
}

TEST_CASE("kernel flag") {
    const auto k = parse_kernel_flag("sum:0.5");
    CHECK(k.kind == KernelSpec::Kind::sum);
    CHECK(k.k0 == 0.5);
    CHECK(parse_kernel_flag("constant").k0 == 1.0);
    CHECK_THROWS_AS(parse_kernel_flag("constant:abc"), Error);
    CHECK_THROWS_AS(parse_kernel_flag("golovin:1"), Error);
    CHECK_THROWS_AS(parse_kernel_flag("table"), Error);
}

TEST_CASE("exit codes are distinct per error family") {
    CHECK(exit_code(ErrorKind::config) != 0);
    CHECK(exit_code(ErrorKind::config) != exit_code(ErrorKind::step_size));
    CHECK(exit_code(ErrorKind::branch_cap) != exit_code(ErrorKind::domain));
}
