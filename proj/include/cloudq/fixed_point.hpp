#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "cloudq/arcsine_fit.hpp"

namespace cloudq {

enum class FixedMode {
    real,     // one integer bit, width - 1 fractional bits, range [0, 2)
    integer,  // plain binary, range [0, 2^width)
};

// Unsigned fixed-point word of 1..63 bits.
struct FixedPointValue {
    std::uint64_t bits = 0;
    int width = 0;
    FixedMode mode = FixedMode::real;

    bool operator==(const FixedPointValue&) const = default;
};

inline constexpr int kMaxFixedWidth = 63;

// Truncates toward zero. Throws Error(range) outside the representable range.
FixedPointValue fp_encode(double x, int width, FixedMode mode = FixedMode::real);
FixedPointValue fp_encode(Float128 x, int width);
FixedPointValue fp_from_bits(std::uint64_t bits, int width, FixedMode mode = FixedMode::real);
double fp_decode(const FixedPointValue& v);
Float128 fp_decode_exact(const FixedPointValue& v);

// Ripple-carry sum; Error(overflow) on carry out.
FixedPointValue fp_add(const FixedPointValue& a, const FixedPointValue& b);
// a - b for a >= b; Error(range) otherwise.
FixedPointValue fp_sub(const FixedPointValue& a, const FixedPointValue& b);
// a >= b.
bool fp_compare(const FixedPointValue& a, const FixedPointValue& b);
FixedPointValue fp_shift_right(const FixedPointValue& a, int places);

// Integer product, width wa + wb.
FixedPointValue fp_mul_int(const FixedPointValue& a, const FixedPointValue& b);
// Product of two reals in [0, 1]; every shifted partial product is truncated
// to the register width before it is accumulated.
FixedPointValue fp_mul_ui(const FixedPointValue& a, const FixedPointValue& b);
// Integer times a real constant in [0, 2), giving a real of `width` bits.
// The constant is held to 62 fractional bits while the partial products are
// accumulated and the sum is truncated once.
FixedPointValue fp_mul_const_int_ui(const FixedPointValue& a, double constant, int width);

// floor(sqrt(a)) at the register resolution, digit by digit.
FixedPointValue fp_sqrt(const FixedPointValue& a);
// floor(a / b) at the register resolution by restoring long division.
// Error(division_by_zero) for b = 0, Error(range) for a > b.
FixedPointValue fp_div(const FixedPointValue& a, const FixedPointValue& b);

// Piecewise polynomial with boundaries and coefficients quantized to one width.
struct QuantizedArcsin {
    int width = 0;
    int degree = 0;
    std::vector<std::uint64_t> lo_bits;
    std::uint64_t hi_bits = 0;
    // Coefficients of (x - lo_k), constant term first, truncated toward zero
    // at width - 1 fractional bits.
    std::vector<std::vector<__int128>> coeffs;
};

QuantizedArcsin quantize_arcsin(const PiecewisePolynomial& pp, int width);

// Piece chosen by comparisons against the boundaries, then Horner evaluation
// in t = a - lo_k with a truncating product per step. Error(domain) when a is
// outside the tiled interval.
FixedPointValue fp_arcsin_pp(const FixedPointValue& a, const QuantizedArcsin& q);
FixedPointValue fp_arcsin_pp(const FixedPointValue& a, const PiecewisePolynomial& pp);

struct PipelineTrace {
    FixedPointValue n_i, n_j, s_next;
    double kdt = 0.0;
    FixedPointValue product, r, s_quarter;
    bool z = false;
    FixedPointValue w, sqrt_w, sqrt_s, quotient, arcsin_out, theta;
};

struct PipelineResult {
    FixedPointValue theta;
    PipelineTrace trace;
    // |theta - arcsin(sqrt(n_i n_j kdt / s_next))| against a quad-precision reference.
    double error = 0.0;
};

// Angle of one probability division: theta ~ arcsin(sqrt(r / s_next)) with
// r = n_i n_j kdt. Inputs r' >= 1/4 go through the complement
// pi/2 - arcsin(sqrt(1 - r')), which needs pieces up to sqrt(3)/2.
PipelineResult emulate_up_pipeline(std::uint64_t n_i, std::uint64_t n_j, double kdt, double s_next,
                                   int width, const QuantizedArcsin& pieces);
PipelineResult emulate_up_pipeline(std::uint64_t n_i, std::uint64_t n_j, double kdt, double s_next,
                                   int width, const PiecewisePolynomial& pieces);

struct SweepResult {
    int width = 0;
    double eps_arcsin = 0.0;
    double max_error = 0.0;
    double mean_error = 0.0;
    std::int64_t samples = 0;
};

// Deterministic low-discrepancy sweep over r' in [0, 1), s in [1/2, 1] and
// n_i, n_j in [1, max_count].
SweepResult estimate_eps_calculation(int width, const PiecewisePolynomial& pieces, std::int64_t samples,
                                     std::uint64_t max_count = 40);

// n_eps,eps_arcsin,max_error,mean_error,samples
void write_sweep_csv(std::ostream& out, const std::vector<SweepResult>& rows);

}  // namespace cloudq
