#include "cloudq/arcsine_fit.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>

extern "C" {
#include <quadmath.h>
}

#include "cloudq/error.hpp"
#include "cloudq/parallel.hpp"
#include "cloudq/resource_model.hpp"

namespace cloudq {

Float128 arcsin_reference(Float128 x) { return asinq(x); }

namespace {

using Matrix = std::vector<std::vector<long double>>;

std::vector<long double> solve_dense(Matrix a, std::vector<long double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const long double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<long double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        long double acc = b[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
        x[i] = acc / a[i][i];
    }
    return x;
}

long double grid_point(double lo, double hi, int k, int grid) {
    return static_cast<long double>(lo) +
           (static_cast<long double>(hi) - static_cast<long double>(lo)) * k / (grid - 1);
}

long double to_t(double lo, double hi, long double x) {
    return (2.0L * x - lo - hi) / (static_cast<long double>(hi) - lo);
}

std::vector<long double> fit_least_squares(double lo, double hi, int degree, int grid) {
    const auto terms = static_cast<std::size_t>(degree) + 1;
    Matrix gram(terms, std::vector<long double>(terms, 0.0L));
    std::vector<long double> rhs(terms, 0.0L);
    std::vector<long double> basis(terms);
    for (int k = 0; k < grid; ++k) {
        const long double x = grid_point(lo, hi, k, grid);
        const long double t = to_t(lo, hi, x);
        const auto f = static_cast<long double>(arcsin_reference(x));
        basis[0] = 1.0L;
        if (terms > 1) basis[1] = t;
        for (std::size_t j = 2; j < terms; ++j) basis[j] = 2.0L * t * basis[j - 1] - basis[j - 2];
        for (std::size_t r = 0; r < terms; ++r) {
            rhs[r] += basis[r] * f;
            for (std::size_t c = 0; c < terms; ++c) gram[r][c] += basis[r] * basis[c];
        }
    }
    return solve_dense(std::move(gram), std::move(rhs));
}

std::vector<long double> fit_interpolation(double lo, double hi, int degree) {
    const int nodes = degree + 1;
    std::vector<long double> coeffs(static_cast<std::size_t>(nodes), 0.0L);
    for (int j = 0; j < nodes; ++j) {
        const long double theta = std::numbers::pi_v<long double> * (j + 0.5L) / nodes;
        const long double t = std::cos(theta);
        const long double x = (t * (static_cast<long double>(hi) - lo) + lo + hi) / 2.0L;
        const auto f = static_cast<long double>(arcsin_reference(x));
        for (int k = 0; k < nodes; ++k) coeffs[static_cast<std::size_t>(k)] += f * std::cos(k * theta);
    }
    for (auto& c : coeffs) c *= 2.0L / nodes;
    coeffs[0] /= 2.0L;
    return coeffs;
}

}  // namespace

std::vector<long double> chebyshev_fit(double lo, double hi, int degree, FitMethod method, int grid) {
    if (degree < 0) throw Error(ErrorKind::range, "chebyshev_fit: degree must be >= 0");
    if (!(lo <= hi) || lo < 0.0 || hi >= 1.0) {
        throw Error(ErrorKind::domain, "chebyshev_fit: need 0 <= lo <= hi < 1");
    }
    if (grid < degree + 2) throw Error(ErrorKind::range, "chebyshev_fit: grid too coarse for the degree");
    if (lo == hi) {
        std::vector<long double> c(static_cast<std::size_t>(degree) + 1, 0.0L);
        c[0] = static_cast<long double>(arcsin_reference(lo));
        return c;
    }
    return method == FitMethod::least_squares ? fit_least_squares(lo, hi, degree, grid)
                                              : fit_interpolation(lo, hi, degree);
}

long double chebyshev_eval(const std::vector<long double>& coeffs, double lo, double hi, long double x) {
    if (lo == hi) return coeffs.empty() ? 0.0L : coeffs[0];
    const long double t = to_t(lo, hi, x);
    long double b1 = 0.0L;
    long double b2 = 0.0L;
    for (std::size_t k = coeffs.size(); k-- > 1;) {
        const long double b0 = coeffs[k] + 2.0L * t * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return (coeffs.empty() ? 0.0L : coeffs[0]) + t * b1 - b2;
}

double linf_error(const std::vector<long double>& coeffs, double lo, double hi, int grid) {
    if (grid < 2) throw Error(ErrorKind::range, "linf_error: grid needs at least 2 points");
    if (lo == hi) {
        return static_cast<double>(
            fabsq(static_cast<Float128>(chebyshev_eval(coeffs, lo, hi, lo)) - arcsin_reference(lo)));
    }
    long double worst = 0.0L;
    for (int k = 0; k < grid; ++k) {
        const long double x = grid_point(lo, hi, k, grid);
        const long double diff = chebyshev_eval(coeffs, lo, hi, x) - static_cast<long double>(arcsin_reference(x));
        worst = std::max(worst, std::fabs(diff));
    }
    return static_cast<double>(worst);
}

PiecewisePolynomial::PiecewisePolynomial(std::vector<ArcsinPiece> pieces, int degree, double eps)
    : pieces_(std::move(pieces)), degree_(degree), eps_(eps) {
    if (pieces_.empty()) throw Error(ErrorKind::range, "piecewise polynomial needs at least one piece");
    for (std::size_t k = 1; k < pieces_.size(); ++k) {
        if (pieces_[k].lo != pieces_[k - 1].hi) {
            throw Error(ErrorKind::range, "piecewise polynomial pieces are not contiguous");
        }
    }
}

std::size_t PiecewisePolynomial::locate(double x) const {
    if (x < lo() || x > hi()) {
        throw Error(ErrorKind::domain, "arcsine approximation evaluated outside its domain");
    }
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                               [](double v, const ArcsinPiece& p) { return v < p.lo; });
    std::size_t k = static_cast<std::size_t>(it - pieces_.begin());
    return k == 0 ? 0 : std::min(k - 1, pieces_.size() - 1);
}

long double PiecewisePolynomial::operator()(double x) const {
    const auto& p = pieces_[locate(x)];
    return chebyshev_eval(p.coeffs, p.lo, p.hi, x);
}

std::vector<Float128> PiecewisePolynomial::shifted_monomial(std::size_t k, Float128 center) const {
    const auto& p = pieces_.at(k);
    const std::size_t terms = p.coeffs.size();
    std::vector<Float128> out(terms, 0);
    if (p.lo == p.hi) {
        out[0] = p.coeffs[0];
        return out;
    }
    const Float128 width = static_cast<Float128>(p.hi) - p.lo;
    const Float128 alpha = 2 / width;
    const Float128 beta = (2 * center - p.lo - p.hi) / width;
    // T_k(alpha u + beta) as polynomials in u.
    std::vector<Float128> prev(terms, 0);
    std::vector<Float128> cur(terms, 0);
    prev[0] = 1;
    for (std::size_t j = 0; j < terms; ++j) out[j] += p.coeffs[0] * prev[j];
    if (terms == 1) return out;
    cur[0] = beta;
    cur[1] = alpha;
    for (std::size_t j = 0; j < terms; ++j) out[j] += p.coeffs[1] * cur[j];
    for (std::size_t deg = 2; deg < terms; ++deg) {
        std::vector<Float128> next(terms, 0);
        for (std::size_t j = 0; j < terms; ++j) {
            next[j] = 2 * beta * cur[j] - prev[j];
            if (j > 0) next[j] += 2 * alpha * cur[j - 1];
        }
        for (std::size_t j = 0; j < terms; ++j) out[j] += p.coeffs[deg] * next[j];
        prev = std::move(cur);
        cur = std::move(next);
    }
    return out;
}

double PiecewisePolynomial::verify(int grid_factor) const {
    std::vector<double> errors(pieces_.size());
    parallel_for(pieces_.size(), [&](std::size_t k) {
        const auto& p = pieces_[k];
        errors[k] = linf_error(p.coeffs, p.lo, p.hi, grid_factor * kDefaultFitGrid);
    });
    return errors.empty() ? 0.0 : *std::max_element(errors.begin(), errors.end());
}

PiecewisePolynomial min_pieces_on(int degree, double eps, double lo, double hi, const FitOptions& options) {
    if (degree < 1) throw Error(ErrorKind::range, "min_pieces: degree must be >= 1");
    if (!(eps > 0.0)) throw Error(ErrorKind::range, "min_pieces: eps must be > 0");
    if (!(lo < hi)) throw Error(ErrorKind::domain, "min_pieces: empty domain");
    std::vector<ArcsinPiece> pieces;
    double a = lo;
    while (a < hi) {
        double b = hi;
        bool accepted = false;
        for (int halving = 0; halving <= 64; ++halving) {
            auto coeffs = chebyshev_fit(a, b, degree, options.method, options.grid);
            if (linf_error(coeffs, a, b, options.grid) < eps) {
                pieces.push_back({a, b, std::move(coeffs)});
                accepted = true;
                break;
            }
            b = (a + b) / 2;
        }
        if (!accepted) {
            throw Error(ErrorKind::degree_too_low,
                        "degree " + std::to_string(degree) + " cannot reach eps " + std::to_string(eps) +
                            " near x = " + std::to_string(a) + " after 64 halvings");
        }
        a = pieces.back().hi;
    }
    return PiecewisePolynomial(std::move(pieces), degree, eps);
}

PiecewisePolynomial min_pieces(int degree, double eps, const FitOptions& options) {
    return min_pieces_on(degree, eps, 0.0, 0.5, options);
}

PiecewisePolynomial extend_domain(const PiecewisePolynomial& pp, double hi, const FitOptions& options) {
    if (hi <= pp.hi()) return pp;
    auto tail = min_pieces_on(pp.degree(), pp.eps(), pp.hi(), hi, options);
    std::vector<ArcsinPiece> pieces = pp.pieces();
    pieces.insert(pieces.end(), tail.pieces().begin(), tail.pieces().end());
    return PiecewisePolynomial(std::move(pieces), pp.degree(), pp.eps());
}

const std::vector<ArcsinTableRow>& published_arcsin_table() {
    static const std::vector<ArcsinTableRow> rows = {
        {1e-12, 4, 43}, {1e-12, 5, 15}, {1e-12, 6, 9},  {1e-13, 5, 25}, {1e-13, 6, 12},
        {1e-13, 7, 7},  {1e-14, 5, 35}, {1e-14, 6, 18}, {1e-14, 7, 10}, {1e-14, 8, 7},
        {1e-15, 6, 27}, {1e-15, 7, 13}, {1e-15, 8, 10}, {1e-15, 9, 11},
    };
    return rows;
}

ArcsinConfig choose_config(const std::vector<ArcsinConfig>& candidates, int n) {
    if (candidates.empty()) throw Error(ErrorKind::config, "choose_config: no candidates");
    ArcsinConfig best = candidates.front();
    BigInt best_cost = primitive_cost(Primitive::arcsin, n, 0, best.degree, best.pieces).t_count;
    for (std::size_t k = 1; k < candidates.size(); ++k) {
        const auto& c = candidates[k];
        const BigInt cost = primitive_cost(Primitive::arcsin, n, 0, c.degree, c.pieces).t_count;
        if (cost < best_cost || (cost == best_cost && c.degree < best.degree)) {
            best = c;
            best_cost = cost;
        }
    }
    return best;
}

ArcsinConfig choose_config(double eps, int n) {
    std::vector<ArcsinConfig> candidates;
    for (const auto& row : published_arcsin_table()) {
        if (std::fabs(row.eps - eps) <= 1e-6 * eps) candidates.push_back({row.degree, row.pieces});
    }
    if (candidates.empty()) {
        throw Error(ErrorKind::config, "choose_config: no tabulated (d, M) rows for this eps");
    }
    return choose_config(candidates, n);
}

void write_table_csv(std::ostream& out, const std::vector<ArcsinTableResult>& rows) {
    out << "eps,d,M,max_error\n";
    for (const auto& r : rows) {
        out << std::setprecision(3) << r.eps << ',' << r.degree << ',' << r.pieces << ','
            << std::setprecision(6) << r.max_error << '\n';
    }
}

void write_quantized_coefficients(std::ostream& out, const PiecewisePolynomial& pp, int width) {
    if (width < 2 || width > 64) throw Error(ErrorKind::range, "quantized export: width must be in [2, 64]");
    const Float128 scale = ldexpq(1, width - 1);
    out << "piece,lo_bits,k,coeff_bits\n";
    for (std::size_t p = 0; p < pp.pieces().size(); ++p) {
        const Float128 lo_q = floorq(static_cast<Float128>(pp.pieces()[p].lo) * scale);
        const auto mono = pp.shifted_monomial(p, lo_q / scale);
        for (std::size_t k = 0; k < mono.size(); ++k) {
            const auto bits = static_cast<long long>(truncq(mono[k] * scale));
            out << p << ',' << static_cast<unsigned long long>(lo_q) << ',' << k << ',' << bits << '\n';
        }
    }
}

}  // namespace cloudq
