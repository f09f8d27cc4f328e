#pragma once

#include <ostream>
#include <vector>

namespace cloudq {

using Float128 = __float128;

// High-precision arcsine (quad precision, about 33 significant digits).
Float128 arcsin_reference(Float128 x);

enum class FitMethod { least_squares, interpolation };

inline constexpr int kDefaultFitGrid = 4096;

// Degree-d Chebyshev series of arcsin on [lo, hi] in the variable
// t = (2x - lo - hi) / (hi - lo).
//   least_squares: discrete least squares on `grid` uniform points
//   interpolation: interpolation at the d + 1 Chebyshev nodes
// A degenerate interval returns the constant arcsin(lo).
std::vector<long double> chebyshev_fit(double lo, double hi, int degree,
                                       FitMethod method = FitMethod::least_squares,
                                       int grid = kDefaultFitGrid);

long double chebyshev_eval(const std::vector<long double>& coeffs, double lo, double hi, long double x);

// max |p - arcsin| over `grid` uniform points of [lo, hi].
double linf_error(const std::vector<long double>& coeffs, double lo, double hi, int grid = kDefaultFitGrid);

struct ArcsinPiece {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<long double> coeffs;
};

class PiecewisePolynomial {
public:
    PiecewisePolynomial() = default;
    PiecewisePolynomial(std::vector<ArcsinPiece> pieces, int degree, double eps);

    const std::vector<ArcsinPiece>& pieces() const noexcept { return pieces_; }
    int degree() const noexcept { return degree_; }
    int piece_count() const noexcept { return static_cast<int>(pieces_.size()); }
    double eps() const noexcept { return eps_; }
    double lo() const { return pieces_.front().lo; }
    double hi() const { return pieces_.back().hi; }

    // Index of the piece whose [lo, hi) holds x; the last piece also takes hi.
    std::size_t locate(double x) const;
    long double operator()(double x) const;

    // Coefficients of piece k as a polynomial in (x - center), highest power last.
    std::vector<Float128> shifted_monomial(std::size_t k, Float128 center) const;

    // Max error per piece on grid_factor * kDefaultFitGrid points each.
    double verify(int grid_factor = 10) const;

private:
    std::vector<ArcsinPiece> pieces_;
    int degree_ = 0;
    double eps_ = 0.0;
};

struct FitOptions {
    FitMethod method = FitMethod::least_squares;
    int grid = kDefaultFitGrid;
};

// Greedy left-to-right tiling of [lo, hi]: halve the right edge toward the
// current left edge until the fit error drops below eps, then continue from
// that edge. Throws Error(degree_too_low) after 64 halvings of one piece.
PiecewisePolynomial min_pieces_on(int degree, double eps, double lo, double hi,
                                  const FitOptions& options = {});

// Tiling of [0, 0.5].
PiecewisePolynomial min_pieces(int degree, double eps, const FitOptions& options = {});

// Appends a greedy tiling of [pp.hi(), hi] to pp.
PiecewisePolynomial extend_domain(const PiecewisePolynomial& pp, double hi, const FitOptions& options = {});

struct ArcsinTableRow {
    double eps;
    int degree;
    int pieces;
};

// Published minimum piece counts per (eps, degree).
const std::vector<ArcsinTableRow>& published_arcsin_table();

struct ArcsinConfig {
    int degree = 0;
    int pieces = 0;
};

// Candidate minimizing the ARCSIN T-count at width n (ties go to smaller d).
ArcsinConfig choose_config(const std::vector<ArcsinConfig>& candidates, int n);

// Candidates taken from the published rows for this eps.
ArcsinConfig choose_config(double eps, int n);

struct ArcsinTableResult {
    double eps;
    int degree;
    int pieces;
    double max_error;
};

// eps,d,M,max_error
void write_table_csv(std::ostream& out, const std::vector<ArcsinTableResult>& rows);

// piece,lo_bits,k,coeff_bits with coefficients of (x - lo) truncated toward
// zero at width - 1 fractional bits.
void write_quantized_coefficients(std::ostream& out, const PiecewisePolynomial& pp, int width);

}  // namespace cloudq
