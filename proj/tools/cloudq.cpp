#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cloudq/arcsine_fit.hpp"
#include "cloudq/config.hpp"
#include "cloudq/csv_export.hpp"
#include "cloudq/division_sim.hpp"
#include "cloudq/error.hpp"
#include "cloudq/fixed_point.hpp"
#include "cloudq/master_solver.hpp"
#include "cloudq/reproduce.hpp"
#include "cloudq/resource_model.hpp"

using namespace cloudq;
using nlohmann::json;

namespace {

struct Flags {
    RunConfig cfg;
    std::optional<std::string> config_path;
    std::optional<std::string> kernel;
    std::optional<std::string> format;
    std::optional<std::string> mode;
    bool check_master = false;
};

void add_common(CLI::App* app, Flags& f) {
    app->add_option("--config", f.config_path, "JSON run configuration");
    app->add_option("--preset", f.cfg.preset, "paper-case-1 ... paper-case-5");
    app->add_option("--N", f.cfg.N, "number of bins (total mass)");
    app->add_option("--M", f.cfg.M, "number of time steps");
    app->add_option("--dt", f.cfg.dt, "time step");
    app->add_option("--kernel", f.kernel, "constant:K0, sum:K0 or product:K0");
    app->add_option("--n-eps", f.cfg.n_eps, "fixed-point register width");
    app->add_option("--d-eps", f.cfg.d_eps, "arcsine polynomial degree of the case");
    app->add_option("--M-eps", f.cfg.M_eps, "arcsine piece count of the case");
    app->add_option("--eps-estimation", f.cfg.eps_estimation, "amplitude estimation error");
    app->add_option("--eps-rotation", f.cfg.eps_rotation, "controlled rotation error");
    app->add_option("--eps-c", f.cfg.eps_c, "readout rotation error");
    app->add_option("--eps-arcsin", f.cfg.eps_arcsin, "arcsine approximation error");
    app->add_option("--delta", f.cfg.delta, "amplitude estimation failure probability");
    app->add_option("--seed", f.cfg.seed, "random seed");
    app->add_option("--out", f.cfg.out, "output path (default stdout)");
    app->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app->add_option("--bin", f.cfg.bin, "bin for expectation readout");
}

RunConfig resolve(Command cmd, const Flags& f) {
    RunConfig flags = f.cfg;
    flags.command = cmd;
    if (f.kernel) flags.kernel = parse_kernel_flag(*f.kernel);
    if (f.format) flags.format = *f.format == "csv" ? OutputFormat::csv : OutputFormat::json;
    if (f.mode) flags.mode = *f.mode == "tree" ? SimMode::tree : SimMode::merged;
    if (f.check_master) flags.check_master = true;
    RunConfig base;
    if (f.config_path) {
        base = parse_config_file(*f.config_path);
        if (base.command && *base.command != cmd) {
            throw Error(ErrorKind::config, *f.config_path + ".command: '" + to_string(*base.command) +
                                               "' does not match subcommand '" + to_string(cmd) + "'");
        }
    }
    return merge(base, flags);
}

class Output {
public:
    explicit Output(const std::optional<std::string>& path) {
        if (path && *path != "-") {
            file_ = std::make_unique<std::ofstream>(*path, std::ios::binary);
            if (!*file_) throw Error(ErrorKind::io, "cannot write '" + *path + "'");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

template <class T>
T require(const std::optional<T>& v, const char* field) {
    if (!v) throw Error(ErrorKind::config, std::string(field) + ": required");
    return *v;
}

TransitionTable table_from(const RunConfig& c) {
    return build_transition_table(require(c.N, "N"), c.kernel.value_or(KernelSpec::constant(1.0)), c.dt.value_or(0.01));
}

json kernel_json(const KernelSpec& k) {
    json j = {{"kind", to_string(k.kind)}, {"k0", k.k0}};
    if (!k.entries.empty()) {
        json e = json::array();
        for (const auto& [i, jj, v] : k.entries) e.push_back({i, jj, v});
        j["entries"] = e;
    }
    return j;
}

json counts_json(const ProbabilityTable& p) {
    json counts = json::array();
    for (int b = 1; b <= p.bins(); ++b) counts.push_back(expected_count(p, b));
    return counts;
}

int run_solve(const RunConfig& c) {
    const auto table = table_from(c);
    const int steps = c.M.value_or(10);
    if (steps < 0) throw Error(ErrorKind::config, "M: must be >= 0");
    std::vector<ProbabilityTable> series{ProbabilityTable::monodisperse(table.bins())};
    for (int m = 0; m < steps; ++m) series.push_back(euler_step(series.back(), table));
    Output out(c.out);
    if (c.format.value_or(OutputFormat::json) == OutputFormat::csv) {
        write_expected_counts_csv(out.stream(), series);
        return 0;
    }
    const auto& last = series.back();
    json j = {{"schema_version", 1},
              {"command", "solve"},
              {"N", table.bins()},
              {"M", steps},
              {"dt", table.dt()},
              {"kernel", kernel_json(table.kernel_spec())},
              {"states", last.size()},
              {"total_probability", last.total()},
              {"expected_counts", counts_json(last)}};
    if (c.runs) {
        SsaConfig s;
        s.runs = *c.runs;
        s.seed = c.seed.value_or(0);
        s.t_end = c.t_end.value_or(steps * table.dt());
        json ssa = json::array();
        for (const auto& e : ssa_estimate_all(table, s)) ssa.push_back({{"mean", e.mean}, {"std_error", e.std_error}});
        j["ssa"] = {{"runs", s.runs}, {"seed", s.seed}, {"t_end", s.t_end}, {"bins", ssa}};
    }
    out.stream() << j.dump(2) << '\n';
    return 0;
}

int run_simulate(const RunConfig& c) {
    const auto table = table_from(c);
    const int steps = c.M.value_or(10);
    const SimMode mode = c.mode.value_or(SimMode::merged);
    const bool csv = c.format.value_or(OutputFormat::json) == OutputFormat::csv;
    json j = {{"schema_version", 1},
              {"command", "simulate"},
              {"N", table.bins()},
              {"M", steps},
              {"dt", table.dt()},
              {"kernel", kernel_json(table.kernel_spec())},
              {"mode", mode == SimMode::tree ? "tree" : "merged"}};

    ProbabilityTable merged;
    std::vector<HistoryBranch> branches;
    if (mode == SimMode::tree) {
        branches = run_tree(table, steps);
        merged = marginalize(branches, table.bins());
        const auto report = history_label_semantics_check(table, steps);
        j["branches"] = branches.size();
        j["label_check"] = {{"labels_checked", report.labels_checked},
                            {"label_mismatches", report.label_mismatches},
                            {"replay_mismatches", report.replay_mismatches}};
    } else {
        merged = run_merged(table, steps);
    }
    json readout = json::array();
    for (int b = 1; b <= table.bins(); ++b) {
        readout.push_back({{"bin", b},
                           {"register_bits", occupancy_register_bits(table.bins(), b)},
                           {"p_zero", readout_probability(merged, b)},
                           {"expected_count", amplitude_expectation(merged, b)}});
    }
    j["states"] = merged.size();
    j["total_probability"] = merged.total();
    j["readout"] = readout;

    int status = 0;
    if (c.check_master.value_or(false)) {
        const auto reference = evolve(ProbabilityTable::monodisperse(table.bins()), table, steps);
        double diff = 0.0;
        for (const auto& [state, p] : reference.entries()) diff = std::max(diff, std::fabs(p - merged.probability(state)));
        for (const auto& [state, p] : merged.entries()) diff = std::max(diff, std::fabs(p - reference.probability(state)));
        const bool ok = diff <= 1e-12;
        j["check_master"] = {{"max_abs_difference", diff}, {"tolerance", 1e-12}, {"pass", ok}};
        if (!ok) {
            std::cerr << "cloudq: division simulation differs from the master equation by " << diff << '\n';
            status = 1;
        }
    }
    Output out(c.out);
    if (csv) {
        if (mode == SimMode::tree) {
            write_branches_csv(out.stream(), branches);
        } else {
            write_probabilities_csv(out.stream(), {merged});
        }
    } else {
        out.stream() << j.dump(2) << '\n';
    }
    return status;
}

int run_emulate(const RunConfig& c) {
    const int width = c.n_eps.value_or(42);
    const int degree = c.d.value_or(5);
    const double eps = c.eps.value_or(1e-12);
    const auto pieces = extend_domain(min_pieces(degree, eps), 0.875);
    const auto sweep = estimate_eps_calculation(width, pieces, c.samples.value_or(10000));
    Output out(c.out);
    if (c.format.value_or(OutputFormat::json) == OutputFormat::csv) {
        write_sweep_csv(out.stream(), {sweep});
        return 0;
    }
    json j = {{"schema_version", 1},
              {"command", "emulate"},
              {"n_eps", sweep.width},
              {"d", degree},
              {"eps_arcsin", sweep.eps_arcsin},
              {"pieces", pieces.piece_count()},
              {"samples", sweep.samples},
              {"max_error", sweep.max_error},
              {"mean_error", sweep.mean_error}};
    out.stream() << j.dump(2) << '\n';
    return 0;
}

int run_arcsine_fit(const RunConfig& c) {
    const int degree = require(c.d, "d");
    const double eps = require(c.eps, "eps");
    const auto pp = min_pieces(degree, eps);
    const double verified = pp.verify(10);
    if (c.coefficients_out) {
        std::ofstream f(*c.coefficients_out, std::ios::binary);
        if (!f) throw Error(ErrorKind::io, "cannot write '" + *c.coefficients_out + "'");
        write_quantized_coefficients(f, pp, require(c.n_eps, "n_eps"));
    }
    Output out(c.out);
    if (c.format.value_or(OutputFormat::json) == OutputFormat::csv) {
        write_table_csv(out.stream(), {{eps, degree, pp.piece_count(), verified}});
        return 0;
    }
    json pieces = json::array();
    for (const auto& p : pp.pieces()) pieces.push_back({{"lo", p.lo}, {"hi", p.hi}});
    json j = {{"schema_version", 1},    {"command", "arcsine-fit"},   {"d", degree},
              {"eps", eps},             {"M", pp.piece_count()},      {"max_error_verification_grid", verified},
              {"meets_eps", verified <= 1.05 * eps}, {"pieces", pieces}};
    out.stream() << j.dump(2) << '\n';
    return 0;
}

int run_estimate(const RunConfig& c) {
    const auto report = estimate_case(to_estimation_case(c));
    Output out(c.out);
    if (c.format.value_or(OutputFormat::json) == OutputFormat::csv) {
        write_summary_csv(out.stream(), {report});
    } else {
        out.stream() << report_json(report) << '\n';
    }
    return 0;
}

int run_reproduce(const RunConfig& c) {
    const auto result = reproduce_tables(true);
    Output out(c.out);
    if (c.format.value_or(OutputFormat::json) == OutputFormat::csv) {
        out.stream() << "table,row,column,expected,computed,tolerance,pass\n";
        for (const auto& cell : result.cells) {
            out.stream() << cell.table << ',' << cell.row << ',' << cell.column << ',' << cell.expected << ','
                         << cell.computed << ',' << (cell.absolute ? "+-" : "") << cell.tolerance << ','
                         << (cell.pass ? "pass" : "FAIL") << '\n';
        }
    } else {
        json cells = json::array();
        for (const auto& cell : result.cells) {
            cells.push_back({{"table", cell.table},
                             {"row", cell.row},
                             {"column", cell.column},
                             {"expected", cell.expected},
                             {"computed", cell.computed},
                             {"tolerance", cell.tolerance},
                             {"tolerance_kind", cell.absolute ? "absolute" : "relative"},
                             {"pass", cell.pass}});
        }
        json j = {{"schema_version", 1},
                  {"command", "reproduce-tables"},
                  {"cells", cells},
                  {"arcsine_exact_rows", result.arcsine_exact_rows},
                  {"arcsine_required_exact", result.arcsine_required_exact},
                  {"all_pass", result.all_pass()}};
        out.stream() << j.dump(2) << '\n';
    }
    return result.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum cloud-microphysics resource and dynamics toolkit"};
    app.require_subcommand(1);

    Flags flags;
    auto* solve = app.add_subcommand("solve", "Euler evolution of the master equation (optionally with SSA)");
    add_common(solve, flags);
    solve->add_option("--runs", flags.cfg.runs, "Gillespie trajectories for the SSA cross-check");
    solve->add_option("--t-end", flags.cfg.t_end, "SSA end time (default M * dt)");

    auto* simulate = app.add_subcommand("simulate", "Probability-division simulation with history registers");
    add_common(simulate, flags);
    simulate->add_option("--mode", flags.mode, "merged or tree")->check(CLI::IsMember({"merged", "tree"}));
    simulate->add_flag("--check-master", flags.check_master, "compare against the master-equation solver");

    auto* emulate = app.add_subcommand("emulate", "Fixed-point pipeline error sweep");
    add_common(emulate, flags);
    emulate->add_option("--d", flags.cfg.d, "arcsine polynomial degree");
    emulate->add_option("--eps", flags.cfg.eps, "arcsine approximation target");
    emulate->add_option("--samples", flags.cfg.samples, "sweep size");

    auto* fit = app.add_subcommand("arcsine-fit", "Minimum piece count of the piecewise arcsine");
    add_common(fit, flags);
    fit->add_option("--d", flags.cfg.d, "polynomial degree");
    fit->add_option("--eps", flags.cfg.eps, "target max error");
    fit->add_option("--coefficients-out", flags.cfg.coefficients_out, "quantized coefficient CSV (needs --n-eps)");

    auto* estimate = app.add_subcommand("estimate", "T-count, T-depth, qubits and error budget");
    add_common(estimate, flags);

    auto* reproduce = app.add_subcommand("reproduce-tables", "Compare all presets and the arcsine table to golden values");
    add_common(reproduce, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_code(ErrorKind::config);
    }

    try {
        if (solve->parsed()) return run_solve(resolve(Command::solve, flags));
        if (simulate->parsed()) return run_simulate(resolve(Command::simulate, flags));
        if (emulate->parsed()) return run_emulate(resolve(Command::emulate, flags));
        if (fit->parsed()) return run_arcsine_fit(resolve(Command::arcsine_fit, flags));
        if (estimate->parsed()) return run_estimate(resolve(Command::estimate, flags));
        if (reproduce->parsed()) return run_reproduce(resolve(Command::reproduce_tables, flags));
    } catch (const Error& e) {
        std::cerr << "cloudq: " << to_string(e.kind()) << " error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "cloudq: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
