#include "cloudq/resource_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "cloudq/arcsine_fit.hpp"
#include "cloudq/error.hpp"
#include "cloudq/parallel.hpp"

namespace cloudq {

const char* to_string(Primitive p) noexcept {
    switch (p) {
        case Primitive::toffoli: return "Toffoli";
        case Primitive::add: return "ADD";
        case Primitive::sub: return "SUB";
        case Primitive::cadd: return "c-ADD";
        case Primitive::csub: return "c-SUB";
        case Primitive::add_const: return "ADD_CONST";
        case Primitive::comp: return "COMP";
        case Primitive::comp_const: return "COMP_CONST";
        case Primitive::mul_int: return "MUL_INT";
        case Primitive::mul_ui: return "MUL_UI";
        case Primitive::mul_const_int_ui: return "MUL_CONST_INT_UI";
        case Primitive::sqrt: return "SQRT";
        case Primitive::div: return "DIV";
        case Primitive::arcsin: return "ARCSIN";
    }
    return "?";
}

Primitive primitive_from_string(const std::string& name) {
    static const Primitive all[] = {
        Primitive::toffoli, Primitive::add,        Primitive::sub,     Primitive::cadd,
        Primitive::csub,    Primitive::add_const,  Primitive::comp,    Primitive::comp_const,
        Primitive::mul_int, Primitive::mul_ui,     Primitive::mul_const_int_ui,
        Primitive::sqrt,    Primitive::div,        Primitive::arcsin,
    };
    for (Primitive p : all) {
        if (name == to_string(p)) return p;
    }
    throw Error(ErrorKind::unknown_primitive, "unknown primitive '" + name + "'");
}

GateCost& GateCost::operator+=(const GateCost& other) {
    t_count += other.t_count;
    t_depth += other.t_depth;
    ancilla = std::max(ancilla, other.ancilla);
    for (const auto& w : other.warnings) {
        if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
    }
    return *this;
}

GateCost operator*(GateCost a, const BigInt& times) {
    a.t_count *= times;
    a.t_depth *= times;
    return a;
}

namespace {

BigInt clamp_formula(const BigInt& value, const std::string& what, std::vector<std::string>& warnings) {
    if (value <= 0) {
        warnings.push_back(what + " formula gives " + value.str() + ", clamped to 0");
        return 0;
    }
    return value;
}

std::string label_of(Primitive op, int n, int m) {
    std::string s = to_string(op);
    s += "_" + std::to_string(n);
    if (op == Primitive::mul_int || op == Primitive::mul_const_int_ui) s += "," + std::to_string(m);
    return s;
}

}  // namespace

GateCost primitive_cost(Primitive op, int n, int m, int d, int pieces, MulConstForm form) {
    if (n < 1) throw Error(ErrorKind::range, std::string(to_string(op)) + ": width must be >= 1");
    const bool two_widths = op == Primitive::mul_int || op == Primitive::mul_const_int_ui;
    if (two_widths && m < 1) throw Error(ErrorKind::range, std::string(to_string(op)) + ": width m must be >= 1");
    if (op == Primitive::arcsin && (d < 1 || pieces < 1)) {
        throw Error(ErrorKind::range, "ARCSIN: degree and piece count must be >= 1");
    }
    const BigInt N = n;
    const BigInt Mw = m;
    BigInt count;
    BigInt depth;
    std::int64_t anc = 0;
    switch (op) {
        case Primitive::toffoli:
            count = 4 * N - 8;
            depth = N - 2;
            anc = n - 1;
            break;
        case Primitive::add:
        case Primitive::sub:
            count = 4 * N - 4;
            depth = 2 * N - 2;
            anc = n - 1;
            break;
        case Primitive::cadd:
        case Primitive::csub:
            count = 8 * N - 4;
            depth = 4 * N - 2;
            anc = 2 * n - 1;
            break;
        case Primitive::add_const:
            count = 4 * N - 8;
            depth = 2 * N - 4;
            anc = 2 * n - 2;
            break;
        case Primitive::comp:
        case Primitive::comp_const:
            count = 8 * N - 16;
            depth = 4 * N - 8;
            anc = 2 * n - 1;
            break;
        case Primitive::mul_int:
            count = 8 * N * Mw - 4 * N * N;
            depth = 4 * N * Mw - 2 * N * N;
            anc = 2 * n - 1;
            break;
        case Primitive::mul_ui:
            count = 4 * N * N;
            depth = 2 * N * N;
            anc = 2 * n - 1;
            break;
        case Primitive::mul_const_int_ui:
            if (form == MulConstForm::printed) {
                count = 8 * N * Mw - 4 * N * N - 2 * Mw * Mw - 4 * N - 6 * Mw;
                depth = 2 * N * Mw - 2 * N * N - Mw * Mw - 2 * N - 3 * Mw;
            } else {
                count = (Mw - N) * (4 * N - 4) + 2 * N * N - 2 * N;
                depth = (Mw - N) * (2 * N - 2) + N * N - N;
            }
            anc = n - 1;
            break;
        case Primitive::sqrt:
            count = 8 * N * N + 16 * N - 32;
            depth = 4 * N * N + 8 * N - 16;
            anc = 6 * std::int64_t{n};
            break;
        case Primitive::div:
            count = 18 * N * N - 30 * N;
            depth = 9 * N * N - 15 * N;
            anc = 2 * n - 1;
            break;
        case Primitive::arcsin: {
            const BigInt D = d;
            const BigInt P = pieces;
            const int lg = ceil_log2(static_cast<std::uint64_t>(pieces));
            const BigInt L = lg;
            count = 32 * P * (N - 2) + 8 * D * (N * N + N - 1) + 16 * D * P * (L - 1);
            depth = 4 * D * std::max<BigInt>(2 * N * N, P * (L - 1)) + 16 * P * (N - 2) + 4 * D * (N - 1);
            anc = std::int64_t{d + 4} * n + 2 * lg;
            break;
        }
    }
    GateCost cost;
    const std::string label = label_of(op, n, m);
    cost.t_count = clamp_formula(count, label + " T-count", cost.warnings);
    cost.t_depth = clamp_formula(depth, label + " T-depth", cost.warnings);
    if (cost.t_depth > cost.t_count) {
        cost.warnings.push_back(label + " T-depth formula gives " + cost.t_depth.str() + " above the T-count " +
                                cost.t_count.str() + ", capped at the T-count");
        cost.t_depth = cost.t_count;
    }
    cost.ancilla = std::max<std::int64_t>(anc, 0);
    return cost;
}

void EstimationCase::validate() const {
    auto positive = [](int v, const char* field) {
        if (v < 1) throw Error(ErrorKind::config, std::string(field) + ": must be a positive integer");
    };
    auto unit = [](double v, const char* field) {
        if (!(v > 0.0 && v < 1.0)) throw Error(ErrorKind::config, std::string(field) + ": must lie in (0, 1)");
    };
    positive(N, "N");
    if (N < 2) throw Error(ErrorKind::config, "N: need at least 2 bins for a collision");
    positive(M, "M");
    positive(n_eps, "n_eps");
    positive(d_eps, "d_eps");
    positive(M_eps, "M_eps");
    unit(eps_rotation, "eps_rotation");
    unit(eps_estimation, "eps_estimation");
    unit(eps_c, "eps_c");
    unit(delta, "delta");
    if (eps_arcsin < 0.0 || !(eps_arcsin < 1.0)) throw Error(ErrorKind::config, "eps_arcsin: must lie in [0, 1)");
    if (eps_calculation && !(*eps_calculation >= 0.0 && *eps_calculation < 1.0)) {
        throw Error(ErrorKind::config, "eps_calculation: must lie in [0, 1)");
    }
    if (readout_bin < 1 || readout_bin > N) throw Error(ErrorKind::config, "bin: must lie in [1, N]");
    if (equal_pair_toffolis != 1 && equal_pair_toffolis != 2) {
        throw Error(ErrorKind::config, "equal_pair_toffolis: must be 1 or 2");
    }
}

std::vector<std::string> preset_names() {
    return {"paper-case-1", "paper-case-2", "paper-case-3", "paper-case-4", "paper-case-5"};
}

EstimationCase preset(const std::string& name) {
    struct Row {
        const char* name;
        int N, M, n_eps, d, Me;
        double rot, est, c;
    };
    static const Row rows[] = {
        {"paper-case-1", 40, 2000, 42, 5, 15, 1e-13, 9.9e-3, 1e-8},
        {"paper-case-2", 126, 2000, 46, 6, 12, 1e-14, 9.9e-3, 1e-8},
        {"paper-case-3", 400, 2000, 49, 8, 10, 1e-15, 9.9e-3, 1e-8},
        {"paper-case-4", 40, 20000, 46, 6, 12, 1e-14, 9.9e-3, 1e-9},
        {"paper-case-5", 40, 2000, 49, 8, 10, 1e-15, 9.9e-4, 1e-10},
    };
    for (const auto& r : rows) {
        if (name != r.name) continue;
        EstimationCase c;
        c.name = r.name;
        c.N = r.N;
        c.M = r.M;
        c.n_eps = r.n_eps;
        c.d_eps = r.d;
        c.M_eps = r.Me;
        c.eps_rotation = r.rot;
        c.eps_estimation = r.est;
        c.eps_c = r.c;
        c.delta = 0.01;
        for (const auto& row : published_arcsin_table()) {
            if (row.degree == r.d && row.pieces == r.Me) c.eps_arcsin = row.eps;
        }
        return c;
    }
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw Error(ErrorKind::config, "preset: unknown name '" + name + "' (known: " + known + ")");
}

int ceil_log2(std::uint64_t x) {
    if (x < 1) throw Error(ErrorKind::range, "ceil_log2: argument must be >= 1");
    return static_cast<int>(std::bit_width(x - 1));
}

int bin_register_bits(int N, int bin) {
    if (bin < 1 || bin > N) throw Error(ErrorKind::range, "bin outside [1, N]");
    return ceil_log2(static_cast<std::uint64_t>(N / bin) + 1);
}

int history_register_bits(int N) { return ceil_log2(static_cast<std::uint64_t>(label_count(N)) + 1); }

namespace {

GateCost rounded(double count, double depth, std::int64_t ancilla) {
    GateCost g;
    g.t_count = BigInt(static_cast<std::int64_t>(std::ceil(count)));
    g.t_depth = BigInt(static_cast<std::int64_t>(std::ceil(depth)));
    g.ancilla = ancilla;
    return g;
}

GateCost mul_const(const EstimationCase& c) {
    const int q1 = bin_register_bits(c.N, 1);
    GateCost g = primitive_cost(Primitive::mul_const_int_ui, 2 * q1, c.n_eps, 0, 0, c.mul_const_form);
    if (c.mul_const_form == MulConstForm::derivation) {
        const GateCost printed =
            primitive_cost(Primitive::mul_const_int_ui, 2 * q1, c.n_eps, 0, 0, MulConstForm::printed);
        if (printed.t_count != g.t_count) {
            g.warnings.push_back("MUL_CONST_INT_UI_" + std::to_string(2 * q1) + "," + std::to_string(c.n_eps) +
                                 ": table closed form disagrees with its derivation; derivation used");
        }
    }
    return g;
}

}  // namespace

GateCost gate_cost_UP(const EstimationCase& c) {
    const int q1 = bin_register_bits(c.N, 1);
    const int n = c.n_eps;
    GateCost g = primitive_cost(Primitive::mul_int, q1, q1);
    g += mul_const(c);
    g += primitive_cost(Primitive::comp, n);
    g += primitive_cost(Primitive::csub, n) * 2;
    g += primitive_cost(Primitive::sqrt, n) * 2;
    g += primitive_cost(Primitive::div, n);
    g += primitive_cost(Primitive::arcsin, n, 0, c.d_eps, c.M_eps);
    return g;
}

GateCost gate_cost_UQ(const EstimationCase& c) {
    return gate_cost_UP(c) + primitive_cost(Primitive::sub, c.n_eps);
}

GateCost gate_cost_UR(const EstimationCase& c) {
    const int q1 = bin_register_bits(c.N, 1);
    GateCost g = primitive_cost(Primitive::mul_int, q1, q1) * 2;
    g += mul_const(c) * 2;
    g += primitive_cost(Primitive::add, c.n_eps);
    return g;
}

GateCost gate_cost_Usin(const EstimationCase& c) {
    const int n = c.n_eps;
    const int qh = history_register_bits(c.N);
    const double lg = std::log2(4.0 / c.eps_rotation);
    return rounded(12.0 * n + 6.6 * lg + 8.0 * qh - 16.0, 3.0 * n + 1.15 * lg + 2.0 * qh - 3.0,
                   5 * std::int64_t{n} + 2);
}

GateCost gate_cost_Uadd(const EstimationCase& c) {
    const int qh = history_register_bits(c.N);
    return primitive_cost(Primitive::add_const, qh) + primitive_cost(Primitive::toffoli, qh);
}

GateCost gate_cost_Ushift(const EstimationCase& c, BinPair pair) {
    if (pair.i > pair.j) std::swap(pair.i, pair.j);
    if (pair.i < 1 || pair.i + pair.j > c.N) throw Error(ErrorKind::label, "U_shift: bin pair outside the table");
    const int qh = history_register_bits(c.N);
    if (pair.equal()) {
        GateCost g = primitive_cost(Primitive::toffoli, qh) * c.equal_pair_toffolis;
        g += primitive_cost(Primitive::cadd, bin_register_bits(c.N, 2 * pair.i));
        g += primitive_cost(Primitive::csub, bin_register_bits(c.N, pair.i));
        return g;
    }
    GateCost g = primitive_cost(Primitive::toffoli, qh) * 2;
    g += primitive_cost(Primitive::cadd, bin_register_bits(c.N, pair.i + pair.j));
    g += primitive_cost(Primitive::csub, bin_register_bits(c.N, pair.i));
    g += primitive_cost(Primitive::csub, bin_register_bits(c.N, pair.j));
    return g;
}

GateCost gate_cost_Uc(const EstimationCase& c, int bin) {
    if (bin < 1 || bin > c.N) throw Error(ErrorKind::range, "U_c: bin outside [1, N]");
    const double I = c.N / bin;
    const double t = 1.15 * I * std::log2(I / c.eps_c);
    return rounded(t, t, 0);
}

QubitBreakdown register_counts(const EstimationCase& c) {
    QubitBreakdown q;
    for (int i = 1; i <= c.N; ++i) q.main += bin_register_bits(c.N, i);
    const int qh = history_register_bits(c.N);
    const int q1 = bin_register_bits(c.N, 1);
    const std::int64_t n = c.n_eps;
    q.history = std::int64_t{c.M} * qh;
    q.a = n;
    q.b = n;
    q.c = 3 * q1 + 5 * n + 1;
    q.c_tally = 4 * q1 + 5 * n + 1;
    q.d = 1;

    std::int64_t arith = 0;
    for (const auto& g : {gate_cost_UP(c), gate_cost_UQ(c), gate_cost_UR(c), gate_cost_Usin(c),
                          gate_cost_Uadd(c)}) {
        arith = std::max(arith, g.ancilla);
    }
    for (int i = 1; 2 * i <= c.N; ++i) {
        for (int j = i; i + j <= c.N; ++j) arith = std::max(arith, gate_cost_Ushift(c, {i, j}).ancilla);
    }
    q.arithmetic = arith;
    return q;
}

std::int64_t oracle_iterations(double eps_estimation, double delta) {
    if (!(eps_estimation > 0.0) || !(delta > 0.0 && delta < 1.0)) {
        throw Error(ErrorKind::domain, "oracle_iterations: need eps > 0 and delta in (0, 1)");
    }
    const double inner = std::numbers::pi / (4.0 * eps_estimation);
    if (!(inner > 1.0)) {
        throw Error(ErrorKind::domain, "oracle_iterations: log2(pi / (4 eps)) must be positive (eps < pi/4)");
    }
    const double arg = (2.0 / delta) * std::log2(inner);
    if (!(arg > 1.0)) throw Error(ErrorKind::domain, "oracle_iterations: logarithm argument must exceed 1");
    return static_cast<std::int64_t>(std::ceil(1.4 / eps_estimation * std::log(arg)));
}

double default_eps_calculation(const EstimationCase& c) {
    return c.eps_calculation ? *c.eps_calculation : std::ldexp(1.0, -c.n_eps + 1) + c.eps_arcsin;
}

double error_budget(const EstimationCase& c, double eps_calculation) {
    const double n_o = static_cast<double>(oracle_iterations(c.eps_estimation, c.delta));
    const double H = static_cast<double>(label_count(c.N));
    return 2.0 * n_o * c.M * H * (eps_calculation + c.eps_rotation) + 2.0 * n_o * c.eps_c + c.eps_estimation;
}

bool ResourceReport::self_consistent() const {
    GateCost div = up + usin + uq + ur;
    if (div.t_count != division.t_count || div.t_depth != division.t_depth) return false;
    GateCost dt = div * H + uadd * (H - 1) + ushift_total;
    if (dt.t_count != step.t_count || dt.t_depth != step.t_depth) return false;
    GateCost ut = dt * input.M;
    if (ut.t_count != evolution.t_count || ut.t_depth != evolution.t_depth) return false;
    const GateCost total = (ut + uc) * preparations;
    if (total.t_count != t_count || total.t_depth != t_depth) return false;
    if (preparations != 2 * oracle_calls + 1) return false;
    return qubits.total() == logical_qubits;
}

ResourceReport estimate_case(const EstimationCase& c) {
    c.validate();
    ResourceReport r;
    r.input = c;
    r.H = static_cast<int>(label_count(c.N));
    r.q1 = bin_register_bits(c.N, 1);
    r.qh = history_register_bits(c.N);

    r.up = gate_cost_UP(c);
    r.usin = gate_cost_Usin(c);
    r.uq = gate_cost_UQ(c);
    r.ur = gate_cost_UR(c);
    r.uadd = gate_cost_Uadd(c);
    for (int i = 1; 2 * i <= c.N; ++i) {
        for (int j = i; i + j <= c.N; ++j) r.ushift_total += gate_cost_Ushift(c, {i, j});
    }
    r.uc = gate_cost_Uc(c, c.readout_bin);

    r.division = r.up + r.usin + r.uq + r.ur;
    r.step = r.division * r.H + r.uadd * (r.H - 1) + r.ushift_total;
    r.evolution = r.step * c.M;

    r.oracle_calls = oracle_iterations(c.eps_estimation, c.delta);
    r.preparations = 2 * r.oracle_calls + 1;
    const GateCost total = (r.evolution + r.uc) * r.preparations;
    r.t_count = total.t_count;
    r.t_depth = total.t_depth;

    r.qubits = register_counts(c);
    r.logical_qubits = r.qubits.total();

    r.eps_calculation = default_eps_calculation(c);
    r.eps_max = error_budget(c, r.eps_calculation);

    r.warnings = total.warnings;
    r.warnings.push_back("one plain state preparation is counted on top of 2 per oracle call");
    if (r.qubits.c != r.qubits.c_tally) {
        r.warnings.push_back("register C uses 3 q_1 + 5 n + 1 = " + std::to_string(r.qubits.c) +
                             "; the per-step register tally gives " + std::to_string(r.qubits.c_tally));
    }
    return r;
}

double to_double(const BigInt& v) { return v.convert_to<double>(); }

ScalingReport scaling_report(const std::vector<int>& Ns, const EstimationCase& base) {
    if (Ns.size() < 2) throw Error(ErrorKind::config, "scaling_report: need at least two N values");
    ScalingReport out;
    out.rows.resize(Ns.size());
    parallel_for(Ns.size(), [&](std::size_t k) {
        EstimationCase c = base;
        c.N = Ns[k];
        c.name = base.name + "@N=" + std::to_string(Ns[k]);
        out.rows[k].N = Ns[k];
        out.rows[k].t_count = estimate_case(c).t_count;
    });
    const double first = to_double(out.rows.front().t_count);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& row : out.rows) {
        row.ratio_to_first = to_double(row.t_count) / first;
        const double x = std::log(static_cast<double>(row.N));
        const double y = std::log(to_double(row.t_count));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(out.rows.size());
    out.loglog_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return out;
}

namespace {

nlohmann::json big(const BigInt& v) {
    if (v <= std::numeric_limits<std::uint64_t>::max()) return v.convert_to<std::uint64_t>();
    return v.str();
}

nlohmann::json cost_json(const GateCost& g) {
    return {{"t_count", big(g.t_count)}, {"t_depth", big(g.t_depth)}, {"ancilla", g.ancilla}};
}

}  // namespace

std::string report_json(const ResourceReport& r) {
    const auto& c = r.input;
    nlohmann::json j;
    j["schema_version"] = 1;
    j["case"] = c.name;
    j["parameters"] = {
        {"N", c.N},
        {"M", c.M},
        {"n_eps", c.n_eps},
        {"d_eps", c.d_eps},
        {"M_eps", c.M_eps},
        {"eps_rotation", c.eps_rotation},
        {"eps_estimation", c.eps_estimation},
        {"eps_c", c.eps_c},
        {"delta", c.delta},
        {"eps_arcsin", c.eps_arcsin},
        {"bin", c.readout_bin},
    };
    j["gates"] = {
        {"U_P", cost_json(r.up)},       {"U_sin", cost_json(r.usin)}, {"U_Q", cost_json(r.uq)},
        {"U_R", cost_json(r.ur)},       {"U_add", cost_json(r.uadd)}, {"U_shift_total", cost_json(r.ushift_total)},
        {"U_c", cost_json(r.uc)},       {"U_dt", cost_json(r.step)},  {"U_t", cost_json(r.evolution)},
    };
    j["t_count_breakdown"] = {
        {"probability_division", {{"t_count_per_label", big(r.division.t_count)}}},
        {"transition_rules",
         {{"labels", r.H},
          {"t_count_labels", big(r.division.t_count * r.H)},
          {"t_count_add_and_shift", big(r.uadd.t_count * (r.H - 1) + r.ushift_total.t_count)}}},
        {"time_steps", {{"steps", c.M}, {"t_count_per_step", big(r.step.t_count)}}},
        {"amplitude_estimation",
         {{"oracle_calls", r.oracle_calls},
          {"preparations", r.preparations},
          {"t_count_per_preparation", big(r.evolution.t_count + r.uc.t_count)}}},
    };
    j["qubits"] = {
        {"main", r.qubits.main},
        {"history", r.qubits.history},
        {"auxiliary",
         {{"A", r.qubits.a},
          {"B", r.qubits.b},
          {"C", r.qubits.c},
          {"C_register_tally", r.qubits.c_tally},
          {"D", r.qubits.d},
          {"arithmetic", r.qubits.arithmetic},
          {"total", r.qubits.auxiliary()}}},
    };
    j["totals"] = {
        {"t_count", big(r.t_count)},
        {"t_depth", big(r.t_depth)},
        {"logical_qubits", r.logical_qubits},
        {"eps_calculation", r.eps_calculation},
        {"eps_max", r.eps_max},
    };
    j["warnings"] = r.warnings;
    return j.dump(2);
}

void write_summary_csv(std::ostream& out, const std::vector<ResourceReport>& reports) {
    out << "case,eps_max,t_count,t_depth,logical_qubits\n";
    for (const auto& r : reports) {
        out << r.input.name << ',' << std::setprecision(6) << r.eps_max << ',' << r.t_count.str() << ','
            << r.t_depth.str() << ',' << r.logical_qubits << '\n';
    }
}

}  // namespace cloudq
