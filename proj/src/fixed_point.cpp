#include "cloudq/fixed_point.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>

extern "C" {
#include <quadmath.h>
}

#include "cloudq/error.hpp"
#include "cloudq/parallel.hpp"

namespace cloudq {

namespace {

using u128 = unsigned __int128;
using i128 = __int128;

void check_width(int width) {
    if (width < 1 || width > kMaxFixedWidth) {
        throw Error(ErrorKind::range, "fixed-point width " + std::to_string(width) + " outside [1, 63]");
    }
}

std::uint64_t mask_of(int width) { return (std::uint64_t{1} << width) - 1; }

void same_format(const FixedPointValue& a, const FixedPointValue& b, const char* op) {
    if (a.width != b.width || a.mode != b.mode) {
        throw Error(ErrorKind::range, std::string(op) + ": operands differ in width or mode");
    }
}

void require_real(const FixedPointValue& a, const char* op) {
    if (a.mode != FixedMode::real) throw Error(ErrorKind::range, std::string(op) + ": needs a real operand");
}

std::uint64_t one_bits(int width) { return std::uint64_t{1} << (width - 1); }

}  // namespace

FixedPointValue fp_from_bits(std::uint64_t bits, int width, FixedMode mode) {
    check_width(width);
    if (bits > mask_of(width)) throw Error(ErrorKind::range, "fixed-point bits exceed the register width");
    return {bits, width, mode};
}

FixedPointValue fp_encode(double x, int width, FixedMode mode) {
    check_width(width);
    if (!std::isfinite(x) || x < 0.0) throw Error(ErrorKind::range, "fixed-point encode: value must be finite and >= 0");
    const double scaled = mode == FixedMode::real ? std::ldexp(x, width - 1) : x;
    if (scaled >= std::ldexp(1.0, width)) {
        throw Error(ErrorKind::range, "fixed-point encode: value outside the " + std::to_string(width) + "-bit range");
    }
    return {static_cast<std::uint64_t>(std::floor(scaled)), width, mode};
}

FixedPointValue fp_encode(Float128 x, int width) {
    check_width(width);
    if (!(x >= 0)) throw Error(ErrorKind::range, "fixed-point encode: value must be >= 0");
    const Float128 scaled = ldexpq(x, width - 1);
    if (scaled >= ldexpq(1, width)) throw Error(ErrorKind::range, "fixed-point encode: value outside [0, 2)");
    return {static_cast<std::uint64_t>(floorq(scaled)), width, FixedMode::real};
}

double fp_decode(const FixedPointValue& v) {
    const auto x = static_cast<double>(v.bits);
    return v.mode == FixedMode::real ? std::ldexp(x, -(v.width - 1)) : x;
}

Float128 fp_decode_exact(const FixedPointValue& v) {
    const auto x = static_cast<Float128>(v.bits);
    return v.mode == FixedMode::real ? ldexpq(x, -(v.width - 1)) : x;
}

FixedPointValue fp_add(const FixedPointValue& a, const FixedPointValue& b) {
    same_format(a, b, "fp_add");
    const std::uint64_t sum = a.bits + b.bits;
    if (sum > mask_of(a.width)) throw Error(ErrorKind::overflow, "fp_add: carry out of the top bit");
    return {sum, a.width, a.mode};
}

FixedPointValue fp_sub(const FixedPointValue& a, const FixedPointValue& b) {
    same_format(a, b, "fp_sub");
    if (b.bits > a.bits) throw Error(ErrorKind::range, "fp_sub: result would be negative");
    return {a.bits - b.bits, a.width, a.mode};
}

bool fp_compare(const FixedPointValue& a, const FixedPointValue& b) {
    same_format(a, b, "fp_compare");
    return a.bits >= b.bits;
}

FixedPointValue fp_shift_right(const FixedPointValue& a, int places) {
    if (places < 0) throw Error(ErrorKind::range, "fp_shift_right: negative shift");
    return {places >= 64 ? 0 : a.bits >> places, a.width, a.mode};
}

FixedPointValue fp_mul_int(const FixedPointValue& a, const FixedPointValue& b) {
    if (a.mode != FixedMode::integer || b.mode != FixedMode::integer) {
        throw Error(ErrorKind::range, "fp_mul_int: needs integer operands");
    }
    const int width = a.width + b.width;
    if (width > kMaxFixedWidth) throw Error(ErrorKind::overflow, "fp_mul_int: product wider than 63 bits");
    std::uint64_t acc = 0;
    for (int k = 0; k < b.width; ++k) {
        if ((b.bits >> k) & 1u) acc += a.bits << k;
    }
    return {acc, width, FixedMode::integer};
}

FixedPointValue fp_mul_ui(const FixedPointValue& a, const FixedPointValue& b) {
    same_format(a, b, "fp_mul_ui");
    require_real(a, "fp_mul_ui");
    const std::uint64_t one = one_bits(a.width);
    if (a.bits > one || b.bits > one) throw Error(ErrorKind::range, "fp_mul_ui: operands must lie in [0, 1]");
    std::uint64_t acc = 0;
    for (int k = 0; k < a.width; ++k) {
        if ((b.bits >> k) & 1u) acc += a.bits >> (a.width - 1 - k);
    }
    return {acc, a.width, FixedMode::real};
}

FixedPointValue fp_mul_const_int_ui(const FixedPointValue& a, double constant, int width) {
    check_width(width);
    if (a.mode != FixedMode::integer) throw Error(ErrorKind::range, "fp_mul_const_int_ui: needs an integer operand");
    if (!(constant >= 0.0 && constant < 2.0)) {
        throw Error(ErrorKind::range, "fp_mul_const_int_ui: constant must lie in [0, 2)");
    }
    constexpr int kConstFraction = 62;
    const auto c = static_cast<std::uint64_t>(std::ldexp(constant, kConstFraction));
    u128 acc = 0;
    for (int k = 0; k < a.width; ++k) {
        if ((a.bits >> k) & 1u) acc += static_cast<u128>(c) << k;
    }
    const u128 bits = acc >> (kConstFraction - (width - 1));
    if (bits > mask_of(width)) throw Error(ErrorKind::overflow, "fp_mul_const_int_ui: product is 2 or more");
    return {static_cast<std::uint64_t>(bits), width, FixedMode::real};
}

FixedPointValue fp_sqrt(const FixedPointValue& a) {
    require_real(a, "fp_sqrt");
    u128 x = static_cast<u128>(a.bits) << (a.width - 1);
    u128 root = 0;
    u128 bit = static_cast<u128>(1) << 126;
    while (bit > x) bit >>= 2;
    while (bit != 0) {
        if (x >= root + bit) {
            x -= root + bit;
            root = (root >> 1) + bit;
        } else {
            root >>= 1;
        }
        bit >>= 2;
    }
    return {static_cast<std::uint64_t>(root), a.width, FixedMode::real};
}

FixedPointValue fp_div(const FixedPointValue& a, const FixedPointValue& b) {
    same_format(a, b, "fp_div");
    require_real(a, "fp_div");
    if (b.bits == 0) throw Error(ErrorKind::division_by_zero, "fp_div: divisor is zero");
    if (a.bits > b.bits) throw Error(ErrorKind::range, "fp_div: dividend exceeds divisor");
    u128 rem = a.bits;
    std::uint64_t q = 0;
    for (int k = 0; k < a.width; ++k) {
        if (k > 0) rem <<= 1;
        q <<= 1;
        if (rem >= b.bits) {
            rem -= b.bits;
            q |= 1u;
        }
    }
    return {q, a.width, FixedMode::real};
}

QuantizedArcsin quantize_arcsin(const PiecewisePolynomial& pp, int width) {
    check_width(width);
    QuantizedArcsin q;
    q.width = width;
    q.degree = pp.degree();
    const Float128 scale = ldexpq(1, width - 1);
    for (std::size_t k = 0; k < pp.pieces().size(); ++k) {
        const Float128 lo = floorq(static_cast<Float128>(pp.pieces()[k].lo) * scale);
        q.lo_bits.push_back(static_cast<std::uint64_t>(lo));
        std::vector<i128> coeffs;
        for (const Float128 c : pp.shifted_monomial(k, lo / scale)) coeffs.push_back(static_cast<i128>(truncq(c * scale)));
        q.coeffs.push_back(std::move(coeffs));
    }
    q.hi_bits = static_cast<std::uint64_t>(floorq(static_cast<Float128>(pp.hi()) * scale));
    return q;
}

FixedPointValue fp_arcsin_pp(const FixedPointValue& a, const QuantizedArcsin& q) {
    require_real(a, "fp_arcsin_pp");
    if (a.width != q.width) throw Error(ErrorKind::range, "fp_arcsin_pp: coefficient width differs from the input");
    if (q.lo_bits.empty() || a.bits < q.lo_bits.front() || a.bits > q.hi_bits) {
        throw Error(ErrorKind::domain, "fp_arcsin_pp: input outside the tiled interval");
    }
    std::size_t k = 0;
    while (k + 1 < q.lo_bits.size() && a.bits >= q.lo_bits[k + 1]) ++k;
    const auto t = static_cast<i128>(a.bits - q.lo_bits[k]);
    const auto& c = q.coeffs[k];
    i128 acc = c.back();
    for (std::size_t j = c.size() - 1; j-- > 0;) acc = ((acc * t) >> (a.width - 1)) + c[j];
    acc = std::clamp<i128>(acc, 0, static_cast<i128>(mask_of(a.width)));
    return {static_cast<std::uint64_t>(acc), a.width, FixedMode::real};
}

FixedPointValue fp_arcsin_pp(const FixedPointValue& a, const PiecewisePolynomial& pp) {
    return fp_arcsin_pp(a, quantize_arcsin(pp, a.width));
}

PipelineResult emulate_up_pipeline(std::uint64_t n_i, std::uint64_t n_j, double kdt, double s_next, int width,
                                   const QuantizedArcsin& pieces) {
    check_width(width);
    if (!(s_next > 0.0)) throw Error(ErrorKind::range, "pipeline: s_{h+1} must be > 0");
    PipelineResult out;
    PipelineTrace& tr = out.trace;
    auto int_width = [](std::uint64_t v) { return std::max(1, static_cast<int>(std::bit_width(v))); };
    tr.n_i = fp_from_bits(n_i, int_width(n_i), FixedMode::integer);
    tr.n_j = fp_from_bits(n_j, int_width(n_j), FixedMode::integer);
    tr.kdt = kdt;
    tr.s_next = fp_encode(s_next, width);

    tr.product = fp_mul_int(tr.n_i, tr.n_j);
    tr.r = fp_mul_const_int_ui(tr.product, kdt, width);
    if (tr.r.bits > tr.s_next.bits) throw Error(ErrorKind::range, "pipeline: r_h exceeds s_{h+1}");
    tr.s_quarter = fp_shift_right(tr.s_next, 2);
    tr.z = fp_compare(tr.r, tr.s_quarter);
    tr.w = tr.z ? fp_sub(tr.s_next, tr.r) : tr.r;
    tr.sqrt_w = fp_sqrt(tr.w);
    tr.sqrt_s = fp_sqrt(tr.s_next);
    tr.quotient = fp_div(tr.sqrt_w, tr.sqrt_s);
    tr.arcsin_out = fp_arcsin_pp(tr.quotient, pieces);
    if (tr.z) {
        const FixedPointValue half_pi = fp_encode(M_PI_2q, width);
        tr.theta = fp_sub(half_pi, tr.arcsin_out);
    } else {
        tr.theta = tr.arcsin_out;
    }
    out.theta = tr.theta;

    const Float128 r_exact = static_cast<Float128>(n_i) * static_cast<Float128>(n_j) * static_cast<Float128>(kdt);
    const Float128 ratio = r_exact / static_cast<Float128>(s_next);
    if (ratio > 1) throw Error(ErrorKind::range, "pipeline: r_h exceeds s_{h+1}");
    const Float128 reference = arcsin_reference(sqrtq(ratio));
    out.error = static_cast<double>(fabsq(fp_decode_exact(out.theta) - reference));
    return out;
}

PipelineResult emulate_up_pipeline(std::uint64_t n_i, std::uint64_t n_j, double kdt, double s_next, int width,
                                   const PiecewisePolynomial& pieces) {
    return emulate_up_pipeline(n_i, n_j, kdt, s_next, width, quantize_arcsin(pieces, width));
}

SweepResult estimate_eps_calculation(int width, const PiecewisePolynomial& pieces, std::int64_t samples,
                                     std::uint64_t max_count) {
    if (samples < 1) throw Error(ErrorKind::range, "sweep: need at least one sample");
    if (max_count < 1) throw Error(ErrorKind::range, "sweep: max_count must be >= 1");
    const QuantizedArcsin q = quantize_arcsin(pieces, width);
    // Additive recurrence on the generalized golden ratio in four dimensions.
    constexpr long double g = 1.1673039782614186843L;
    const long double alpha[4] = {1 / g, 1 / (g * g), 1 / (g * g * g), 1 / (g * g * g * g)};
    std::vector<double> errors(static_cast<std::size_t>(samples));
    parallel_for(errors.size(), [&](std::size_t k) {
        long double u[4];
        for (int d = 0; d < 4; ++d) {
            long double v = 0.5L + alpha[d] * static_cast<long double>(k + 1);
            u[d] = v - std::floor(v);
        }
        const double r_prime = static_cast<double>(u[0]);
        const double s = fp_decode(fp_encode(0.5 + 0.5 * static_cast<double>(u[1]), width));
        const std::uint64_t n_i = 1 + static_cast<std::uint64_t>(u[2] * max_count) % max_count;
        const std::uint64_t n_j = 1 + static_cast<std::uint64_t>(u[3] * max_count) % max_count;
        const double kdt = r_prime * s / static_cast<double>(n_i * n_j);
        errors[k] = emulate_up_pipeline(n_i, n_j, kdt, s, width, q).error;
    });
    SweepResult res;
    res.width = width;
    res.eps_arcsin = pieces.eps();
    res.samples = samples;
    double sum = 0.0;
    for (double e : errors) {
        res.max_error = std::max(res.max_error, e);
        sum += e;
    }
    res.mean_error = sum / static_cast<double>(samples);
    return res;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepResult>& rows) {
    out << "n_eps,eps_arcsin,max_error,mean_error,samples\n";
    for (const auto& r : rows) {
        out << r.width << ',' << std::setprecision(3) << r.eps_arcsin << ',' << std::setprecision(6) << r.max_error
            << ',' << r.mean_error << ',' << r.samples << '\n';
    }
}

}  // namespace cloudq
