#include "cloudq/config.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "cloudq/arcsine_fit.hpp"
#include "cloudq/error.hpp"

namespace cloudq {

const char* to_string(Command c) noexcept {
    switch (c) {
        case Command::solve: return "solve";
        case Command::simulate: return "simulate";
        case Command::emulate: return "emulate";
        case Command::arcsine_fit: return "arcsine-fit";
        case Command::estimate: return "estimate";
        case Command::reproduce_tables: return "reproduce-tables";
    }
    return "?";
}

Command command_from_string(const std::string& name) {
    for (Command c : {Command::solve, Command::simulate, Command::emulate, Command::arcsine_fit, Command::estimate,
                      Command::reproduce_tables}) {
        if (name == to_string(c)) return c;
    }
    throw Error(ErrorKind::config, "command: unknown value '" + name + "'");
}

namespace {

template <class T>
void take(std::optional<T>& dst, const std::optional<T>& src) {
    if (src) dst = src;
}

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw Error(ErrorKind::config, path + ": " + what);
}

int get_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < INT32_MIN || x > INT32_MAX) fail(path, "integer out of range");
    return static_cast<int>(x);
}

std::int64_t get_int64(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<std::int64_t>();
}

std::uint64_t get_uint64(const json& v, const std::string& path) {
    if (!v.is_number_unsigned()) fail(path, "expected a non-negative integer");
    return v.get<std::uint64_t>();
}

double get_double(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

std::string get_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

KernelSpec parse_kernel(const json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object with kind, k0, entries");
    KernelSpec k;
    for (const auto& [key, value] : v.items()) {
        const std::string p = path + "." + key;
        if (key == "kind") {
            try {
                k.kind = kernel_kind_from_string(get_string(value, p));
            } catch (const Error& e) {
                fail(p, e.what());
            }
        } else if (key == "k0") {
            k.k0 = get_double(value, p);
        } else if (key == "entries") {
            if (!value.is_array()) fail(p, "expected an array of [i, j, K] triples");
            for (std::size_t n = 0; n < value.size(); ++n) {
                const std::string ep = p + "[" + std::to_string(n) + "]";
                const auto& e = value[n];
                if (!e.is_array() || e.size() != 3) fail(ep, "expected [i, j, K]");
                k.entries.emplace_back(get_int(e[0], ep + "[0]"), get_int(e[1], ep + "[1]"),
                                       get_double(e[2], ep + "[2]"));
            }
        } else {
            fail(p, "unknown key");
        }
    }
    try {
        k.validate();
    } catch (const Error& e) {
        fail(path, e.what());
    }
    return k;
}

}  // namespace

RunConfig merge(const RunConfig& base, const RunConfig& over) {
    RunConfig r = base;
    take(r.command, over.command);
    take(r.preset, over.preset);
    take(r.N, over.N);
    take(r.M, over.M);
    take(r.dt, over.dt);
    take(r.kernel, over.kernel);
    take(r.n_eps, over.n_eps);
    take(r.d_eps, over.d_eps);
    take(r.M_eps, over.M_eps);
    take(r.eps_rotation, over.eps_rotation);
    take(r.eps_estimation, over.eps_estimation);
    take(r.eps_c, over.eps_c);
    take(r.delta, over.delta);
    take(r.eps_arcsin, over.eps_arcsin);
    take(r.seed, over.seed);
    take(r.out, over.out);
    take(r.format, over.format);
    take(r.runs, over.runs);
    take(r.bin, over.bin);
    take(r.mode, over.mode);
    take(r.check_master, over.check_master);
    take(r.d, over.d);
    take(r.eps, over.eps);
    take(r.samples, over.samples);
    take(r.t_end, over.t_end);
    take(r.coefficients_out, over.coefficients_out);
    return r;
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw Error(ErrorKind::config,
                    origin + ": empty configuration; required fields: command, and for estimate either preset "
                             "or N, M, n_eps, d_eps, M_eps, eps_rotation, eps_estimation, eps_c");
    }
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::config, origin + ": malformed JSON (" + e.what() + ")");
    }
    if (!doc.is_object()) fail(origin, "top level must be an object");

    RunConfig c;
    for (const auto& [key, v] : doc.items()) {
        const std::string p = origin + "." + key;
        if (key == "command") {
            try {
                c.command = command_from_string(get_string(v, p));
            } catch (const Error& e) {
                fail(p, e.what());
            }
        } else if (key == "preset") {
            c.preset = get_string(v, p);
        } else if (key == "N") {
            c.N = get_int(v, p);
        } else if (key == "M") {
            c.M = get_int(v, p);
        } else if (key == "dt") {
            c.dt = get_double(v, p);
        } else if (key == "kernel") {
            c.kernel = parse_kernel(v, p);
        } else if (key == "n_eps") {
            c.n_eps = get_int(v, p);
        } else if (key == "d_eps") {
            c.d_eps = get_int(v, p);
        } else if (key == "M_eps") {
            c.M_eps = get_int(v, p);
        } else if (key == "eps_rotation") {
            c.eps_rotation = get_double(v, p);
        } else if (key == "eps_estimation") {
            c.eps_estimation = get_double(v, p);
        } else if (key == "eps_c") {
            c.eps_c = get_double(v, p);
        } else if (key == "delta") {
            c.delta = get_double(v, p);
        } else if (key == "eps_arcsin") {
            c.eps_arcsin = get_double(v, p);
        } else if (key == "seed") {
            c.seed = get_uint64(v, p);
        } else if (key == "out") {
            c.out = get_string(v, p);
        } else if (key == "format") {
            const std::string f = get_string(v, p);
            if (f == "json") {
                c.format = OutputFormat::json;
            } else if (f == "csv") {
                c.format = OutputFormat::csv;
            } else {
                fail(p, "expected \"json\" or \"csv\"");
            }
        } else if (key == "runs") {
            c.runs = get_int64(v, p);
        } else if (key == "bin") {
            c.bin = get_int(v, p);
        } else if (key == "mode") {
            const std::string m = get_string(v, p);
            if (m == "merged") {
                c.mode = SimMode::merged;
            } else if (m == "tree") {
                c.mode = SimMode::tree;
            } else {
                fail(p, "expected \"merged\" or \"tree\"");
            }
        } else if (key == "check_master") {
            if (!v.is_boolean()) fail(p, "expected true or false");
            c.check_master = v.get<bool>();
        } else if (key == "d") {
            c.d = get_int(v, p);
        } else if (key == "eps") {
            c.eps = get_double(v, p);
        } else if (key == "samples") {
            c.samples = get_int64(v, p);
        } else if (key == "t_end") {
            c.t_end = get_double(v, p);
        } else if (key == "coefficients_out") {
            c.coefficients_out = get_string(v, p);
        } else {
            fail(p, "unknown key");
        }
    }
    return c;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

EstimationCase to_estimation_case(const RunConfig& cfg) {
    EstimationCase c;
    bool from_preset = false;
    if (cfg.preset) {
        c = preset(*cfg.preset);
        from_preset = true;
    } else {
        c.name = "custom";
    }
    std::vector<std::string> missing;
    auto apply = [&](auto& dst, const auto& src, const char* field) {
        if (src) {
            dst = *src;
        } else if (!from_preset) {
            missing.emplace_back(field);
        }
    };
    apply(c.N, cfg.N, "N");
    apply(c.M, cfg.M, "M");
    apply(c.n_eps, cfg.n_eps, "n_eps");
    apply(c.d_eps, cfg.d_eps, "d_eps");
    apply(c.M_eps, cfg.M_eps, "M_eps");
    apply(c.eps_rotation, cfg.eps_rotation, "eps_rotation");
    apply(c.eps_estimation, cfg.eps_estimation, "eps_estimation");
    apply(c.eps_c, cfg.eps_c, "eps_c");
    if (cfg.delta) c.delta = *cfg.delta;
    if (cfg.eps_arcsin) {
        c.eps_arcsin = *cfg.eps_arcsin;
    } else if (!from_preset) {
        for (const auto& row : published_arcsin_table()) {
            if (row.degree == c.d_eps && row.pieces == c.M_eps) c.eps_arcsin = row.eps;
        }
    }
    if (cfg.bin) c.readout_bin = *cfg.bin;
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        throw Error(ErrorKind::config, "estimation case: missing required fields " + list + " (or give a preset)");
    }
    c.validate();
    return c;
}

KernelSpec parse_kernel_flag(const std::string& text) {
    const auto colon = text.find(':');
    KernelSpec k;
    k.kind = kernel_kind_from_string(text.substr(0, colon));
    if (k.kind == KernelSpec::Kind::table) {
        throw Error(ErrorKind::config, "--kernel: table kernels need a config file");
    }
    if (colon != std::string::npos) {
        try {
            std::size_t used = 0;
            k.k0 = std::stod(text.substr(colon + 1), &used);
            if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw Error(ErrorKind::config, "--kernel: bad coefficient in '" + text + "'");
        }
    }
    k.validate();
    return k;
}

}  // namespace cloudq
