#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace twoscale {

/// Cubic polynomial in the absolute coordinate: c[0] + c[1] t + c[2] t^2 + c[3] t^3.
using Poly3 = std::array<double, 4>;

double eval_poly(const Poly3& c, double t);

/// Real potential given by polynomial pieces between strictly increasing
/// breakpoints, identically zero outside [front, back].
///
/// Coefficients refer to the absolute coordinate t, not to a local offset, so
/// rescaling x -> x / s only rescales the coefficients.
class PiecewisePotential {
public:
    PiecewisePotential() = default;
    PiecewisePotential(std::vector<double> breakpoints, std::vector<Poly3> pieces);

    /// Constant `value` on [a, b].
    static PiecewisePotential indicator(double a, double b, double value = 1.0);

    /// Piecewise-constant potential from cell edges and one value per cell.
    static PiecewisePotential piecewise_constant(std::vector<double> edges,
                                                 std::span<const double> values);

    /// Converts a tabulated potential by evaluating `f` at each cell midpoint.
    static PiecewisePotential from_samples(std::vector<double> edges,
                                           const std::function<double(double)>& f);

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<Poly3>& pieces() const { return pieces_; }
    std::size_t size() const { return pieces_.size(); }
    bool empty() const { return pieces_.empty(); }

    /// Support bounds; (0, 0) for the zero potential.
    std::pair<double, double> support() const;

    /// Highest polynomial degree with a nonzero coefficient.
    int degree() const;

    /// Support inside [-1, 1], the admissible class for Phi and Psi.
    bool is_class_p() const;

    /// Index of the piece containing t (right-hand piece at interior breakpoints),
    /// or npos outside the support.
    std::size_t piece_index(double t) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    double operator()(double t) const;

    /// Multiplies every coefficient by `factor`.
    PiecewisePotential scaled(double factor) const;

    /// Returns x -> amplitude * P(x / length).
    PiecewisePotential dilated(double length, double amplitude) const;

    /// Largest |P(t)| over the support.
    double sup_norm() const;

private:
    std::vector<double> breakpoints_;
    std::vector<Poly3> pieces_;
};

/// Exact integral of t^n P(t) over the support, n <= 4.
double moment(const PiecewisePotential& p, int n);

/// Exact integral of t^n P(t) over [lo, hi] intersected with the support.
double moment(const PiecewisePotential& p, int n, double lo, double hi);

/// Integral of P over the positive and the negative half-line.
double positive_mass(const PiecewisePotential& p);
double negative_mass(const PiecewisePotential& p);

/// Sum of two potentials on the merged breakpoint grid. Breakpoints closer
/// than `merge_tol` are merged into one.
PiecewisePotential add(const PiecewisePotential& a, const PiecewisePotential& b,
                       double merge_tol);

/// x -> alpha eps^-2 Phi(x/eps) + beta nu^-1 Psi(x/nu).
PiecewisePotential assemble_scaled(const PiecewisePotential& phi, const PiecewisePotential& psi,
                                   double alpha, double beta, double eps, double nu);

namespace library {
/// Unit well: 1 on [-1, 1].
PiecewisePotential well();
/// Dipole: +1 on [-1, 0), -1 on [0, 1]; zero mean and first moment -1.
PiecewisePotential dip();
/// Normalized box: 1/2 on [-1, 1].
PiecewisePotential boxdelta();
}  // namespace library

}  // namespace twoscale
