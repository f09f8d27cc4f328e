#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cloudq/resource_model.hpp"
#include "cloudq/state_space.hpp"

namespace cloudq {

enum class Command { solve, simulate, emulate, arcsine_fit, estimate, reproduce_tables };
enum class OutputFormat { json, csv };
enum class SimMode { merged, tree };

const char* to_string(Command c) noexcept;
Command command_from_string(const std::string& name);

// Every field is optional so that a config file and command-line flags can be
// layered; `merge` lets the second source win field by field.
struct RunConfig {
    std::optional<Command> command;
    std::optional<std::string> preset;

    std::optional<int> N;
    std::optional<int> M;
    std::optional<double> dt;
    std::optional<KernelSpec> kernel;

    std::optional<int> n_eps;
    std::optional<int> d_eps;
    std::optional<int> M_eps;
    std::optional<double> eps_rotation;
    std::optional<double> eps_estimation;
    std::optional<double> eps_c;
    std::optional<double> delta;
    std::optional<double> eps_arcsin;

    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<OutputFormat> format;
    std::optional<std::int64_t> runs;
    std::optional<int> bin;
    std::optional<SimMode> mode;
    std::optional<bool> check_master;
    std::optional<int> d;
    std::optional<double> eps;
    std::optional<std::int64_t> samples;
    std::optional<double> t_end;
    std::optional<std::string> coefficients_out;
};

RunConfig merge(const RunConfig& base, const RunConfig& over);

// Strict JSON parsing: unknown keys and type mismatches raise Error(config)
// naming the offending field path.
RunConfig parse_config_text(const std::string& text, const std::string& origin = "config");
RunConfig parse_config_file(const std::string& path);

// Preset (if any) overlaid with explicit case fields; every field must end
// up set. Throws Error(config) listing what is missing.
EstimationCase to_estimation_case(const RunConfig& cfg);

// Kernel on the command line: "constant:1", "sum:0.5", "product:2".
KernelSpec parse_kernel_flag(const std::string& text);

}  // namespace cloudq
