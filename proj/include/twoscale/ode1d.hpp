#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "twoscale/potential.hpp"

namespace twoscale {

using cplx = std::complex<double>;

/// 2x2 complex matrix acting on (u, u') column vectors.
struct Mat2 {
    cplx m11{1.0}, m12{0.0}, m21{0.0}, m22{1.0};

    static Mat2 identity() { return {}; }
    cplx det() const { return m11 * m22 - m12 * m21; }
    std::array<cplx, 2> apply(cplx u, cplx du) const
    {
        return {m11 * u + m12 * du, m21 * u + m22 * du};
    }
    /// Inverse of a unimodular matrix.
    Mat2 unimodular_inverse() const { return {m22, -m12, -m21, m11}; }
    double norm() const;
};

Mat2 operator*(const Mat2& lhs, const Mat2& rhs);

/// |det - 1| relative to the size of the two products forming the determinant.
double det_defect(const Mat2& m);

/// Propagator of -u'' + q u = E u from `a` to `b`.
/// Columns are the fundamental solutions with (u, u')(a) = (1, 0) and (0, 1),
/// evaluated at b.
struct TransferMatrix {
    Mat2 m;
    double a = 0.0;
    double b = 0.0;
    cplx energy{0.0};

    std::array<cplx, 2> apply(cplx u, cplx du) const { return m.apply(u, du); }
    double det_defect() const { return twoscale::det_defect(m); }
};

/// Propagator over [b, c] composed after one over [a, b].
TransferMatrix compose(const TransferMatrix& later, const TransferMatrix& earlier);

TransferMatrix transfer_matrix(const PiecewisePotential& q, cplx energy, double a, double b);

/// Constant-potential propagator for u'' = w u over a signed length.
/// Entire in w; no branch choice is involved.
Mat2 constant_propagator(cplx w, double length);

/// Real function given by samples on a strictly increasing grid, linearly
/// interpolated and zero outside the grid.
struct SampledFunction {
    std::vector<double> grid;
    std::vector<double> values;

    double operator()(double t) const;
    /// Value at `t` and slope of the interpolating segment containing `t`.
    std::pair<double, double> segment(double t) const;
};

struct SolutionTrace {
    std::vector<double> nodes;
    std::vector<cplx> u;
    std::vector<cplx> du;
};

struct IvpOptions {
    /// Minimum number of uniform subdivisions of [a, b]; breakpoints are always nodes.
    int resolution = 256;
};

/// Solves u'' + (E - q) u = rhs, u(t0) = u0, u'(t0) = du0 on [a, b].
/// With no rhs this is the homogeneous equation -u'' + q u = E u.
SolutionTrace solve_ivp(const PiecewisePotential& q, cplx energy,
                        const std::optional<SampledFunction>& rhs, double t0, cplx u0, cplx du0,
                        double a, double b, IvpOptions options = {});

}  // namespace twoscale
