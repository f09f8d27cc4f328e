#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cloudq/state_space.hpp"

namespace cloudq {

using BigInt = boost::multiprecision::cpp_int;

enum class Primitive {
    toffoli,
    add,
    sub,
    cadd,
    csub,
    add_const,
    comp,
    comp_const,
    mul_int,
    mul_ui,
    mul_const_int_ui,
    sqrt,
    div,
    arcsin,
};

const char* to_string(Primitive p) noexcept;
// Throws Error(unknown_primitive).
Primitive primitive_from_string(const std::string& name);

struct GateCost {
    BigInt t_count = 0;
    BigInt t_depth = 0;
    std::int64_t ancilla = 0;
    std::vector<std::string> warnings;

    // Sequential composition: counts and depths add, ancilla is reused.
    GateCost& operator+=(const GateCost& other);
    friend GateCost operator+(GateCost a, const GateCost& b) { return a += b; }
    // `times` sequential repetitions.
    friend GateCost operator*(GateCost a, const BigInt& times);
};

// Closed form used for MUL_CONST_INT_UI.
enum class MulConstForm {
    derivation,  // (m - n)(4n - 4) + 2n^2 - 2n, depth (m - n)(2n - 2) + n^2 - n
    printed,     // 8nm - 4n^2 - 2m^2 - 4n - 6m, depth 2nm - 2n^2 - m^2 - 2n - 3m
};

// Per-primitive T-count, T-depth and ancilla. n and m are register widths,
// d and pieces the arcsine degree and piece count. Non-positive formula values
// are clamped to 0 and recorded in `warnings`; so is a depth above the count,
// which only the smallest widths produce.
GateCost primitive_cost(Primitive op, int n, int m = 0, int d = 0, int pieces = 0,
                        MulConstForm form = MulConstForm::derivation);

struct EstimationCase {
    std::string name;
    int N = 0;
    int M = 0;
    int n_eps = 0;
    int d_eps = 0;
    int M_eps = 0;
    double eps_rotation = 0.0;
    double eps_estimation = 0.0;
    double eps_c = 0.0;
    double delta = 0.01;
    // Approximation error of the piecewise arcsine at (d_eps, M_eps).
    double eps_arcsin = 0.0;
    // Replaces 2^{-n_eps+1} + eps_arcsin in the error budget when set.
    std::optional<double> eps_calculation;
    int readout_bin = 1;
    MulConstForm mul_const_form = MulConstForm::derivation;
    // Toffolis in U_shift for an equal-mass pair (2, or 1 for the variant).
    int equal_pair_toffolis = 2;

    // Throws Error(config).
    void validate() const;
};

std::vector<std::string> preset_names();
// "paper-case-1" ... "paper-case-5"; throws Error(config) for unknown names.
EstimationCase preset(const std::string& name);

// ceil(log2(x)) for x >= 1.
int ceil_log2(std::uint64_t x);

// q_i = ceil(log2(floor(N / i) + 1)).
int bin_register_bits(int N, int bin);
// q_h = ceil(log2(H + 1)).
int history_register_bits(int N);

GateCost gate_cost_UP(const EstimationCase& c);
GateCost gate_cost_UQ(const EstimationCase& c);
GateCost gate_cost_UR(const EstimationCase& c);
GateCost gate_cost_Usin(const EstimationCase& c);
GateCost gate_cost_Uadd(const EstimationCase& c);
GateCost gate_cost_Ushift(const EstimationCase& c, BinPair pair);
GateCost gate_cost_Uc(const EstimationCase& c, int bin);

struct QubitBreakdown {
    std::int64_t main = 0;
    std::int64_t history = 0;
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::int64_t c = 0;        // 3 q_1 + 5 n + 1
    std::int64_t c_tally = 0;  // 4 q_1 + 5 n + 1, informational
    std::int64_t d = 0;
    std::int64_t arithmetic = 0;

    std::int64_t auxiliary() const noexcept { return a + b + c + d + arithmetic; }
    std::int64_t total() const noexcept { return main + history + auxiliary(); }
};

QubitBreakdown register_counts(const EstimationCase& c);

// ceil((1.4 / eps) ln((2 / delta) log2(pi / (4 eps)))). Throws Error(domain)
// when the logarithms are not positive.
std::int64_t oracle_iterations(double eps_estimation, double delta);

double default_eps_calculation(const EstimationCase& c);

double error_budget(const EstimationCase& c, double eps_calculation);

struct ResourceReport {
    EstimationCase input;
    int H = 0;
    int q1 = 0;
    int qh = 0;

    GateCost up, usin, uq, ur, uadd, ushift_total, uc;
    GateCost division;  // up + usin + uq + ur, one transition label
    GateCost step;      // U_dt
    GateCost evolution; // U_t

    std::int64_t oracle_calls = 0;
    // Times U_t + U_c runs: 2 per oracle call plus one plain preparation.
    std::int64_t preparations = 0;

    BigInt t_count = 0;
    BigInt t_depth = 0;
    QubitBreakdown qubits;
    std::int64_t logical_qubits = 0;

    double eps_calculation = 0.0;
    double eps_max = 0.0;

    std::vector<std::string> warnings;

    // Recomputes t_count / t_depth / qubits from the breakdown.
    bool self_consistent() const;
};

ResourceReport estimate_case(const EstimationCase& c);

struct ScalingRow {
    int N = 0;
    BigInt t_count = 0;
    double ratio_to_first = 1.0;
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    // Least-squares slope of log T-count against log N.
    double loglog_slope = 0.0;
};

ScalingReport scaling_report(const std::vector<int>& Ns, const EstimationCase& base);

// Double approximation of a big integer, for ratios and printing.
double to_double(const BigInt& v);

std::string report_json(const ResourceReport& r);

// case,eps_max,t_count,t_depth,logical_qubits
void write_summary_csv(std::ostream& out, const std::vector<ResourceReport>& reports);

}  // namespace cloudq
