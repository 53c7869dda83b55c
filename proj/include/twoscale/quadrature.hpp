#pragma once

#include <functional>
#include <span>
#include <vector>

namespace twoscale {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule, nodes by Newton iteration on P_n.
GaussRule gauss_legendre(int n);

/// The 15-point rule, computed once.
const GaussRule& gauss15();

/// Composite 15-point Gauss over [a, b] split into `parts` equal pieces.
double gauss_composite(const std::function<double(double)>& f, double a, double b, int parts);

/// Integral over [a, b] of a function smooth between consecutive `kinks`.
/// Each smooth span is refined by doubling until successive estimates agree
/// to `abs_tol`.
double integrate_piecewise_smooth(const std::function<double(double)>& f, double a, double b,
                                  std::span<const double> kinks, double abs_tol,
                                  double initial_part_length);

}  // namespace twoscale
