#pragma once

#include <span>
#include <vector>

#include "twoscale/ode1d.hpp"
#include "twoscale/potential.hpp"
#include "twoscale/resonance.hpp"

namespace twoscale {

/// Limit operator: free Laplacian off the origin with either the interface
/// conditions
///   phi(+0) = g1 phi(-0),  phi'(+0) = phi'(-0) / g1 + g2 phi(-0)
/// or Dirichlet conditions phi(-0) = phi(+0) = 0 on both half-lines.
class PointInteraction {
public:
    enum class Kind { Connected, DirichletDecoupled };

    /// Throws std::invalid_argument for gamma1 == 0.
    static PointInteraction connected(double gamma1, double gamma2);
    static PointInteraction dirichlet_decoupled();

    Kind kind() const { return kind_; }
    bool is_connected() const { return kind_ == Kind::Connected; }
    double gamma1() const { return gamma1_; }
    double gamma2() const { return gamma2_; }

private:
    PointInteraction(Kind kind, double g1, double g2) : kind_(kind), gamma1_(g1), gamma2_(g2) {}

    Kind kind_;
    double gamma1_;
    double gamma2_;
};

/// Plane-wave scattering amplitudes at momentum k > 0.
struct ScatteringData {
    double k = 0.0;
    cplx t_amp{1.0};    // transmission, incidence from the left
    cplx t_right{1.0};  // transmission, incidence from the right
    cplx r_left{0.0};
    cplx r_right{0.0};
    double unitarity_defect = 0.0;
};

/// | |t|^2 + |r_left|^2 - 1 |.
double unitarity_defect(const ScatteringData& sd);

PointInteraction limit_operator(const PiecewisePotential& phi, const PiecewisePotential& psi,
                                double alpha, double beta, const Regime& regime,
                                double tol = kDefaultResonanceTol);

ScatteringData scattering_point(const PointInteraction& pi, double k);

/// Output of the limit resolvent on a grid. The value stored at the origin
/// node is the left limit y(-0).
struct PointResolvent {
    std::vector<double> grid;
    std::vector<cplx> values;
    cplx y_minus{0.0}, y_plus{0.0};
    cplx dy_minus{0.0}, dy_plus{0.0};
};

/// y = (S - z)^{-1} f on the whole line for f sampled on a uniform grid over
/// [-L, L] (zero outside) with a node at 0; trapezoid-rule Green's-function
/// convolution with Im sqrt(z) > 0.
PointResolvent resolvent_point(const PointInteraction& pi, cplx z, std::span<const double> grid,
                               std::span<const cplx> f);

/// sqrt(z) on the branch with positive imaginary part.
cplx decaying_root(cplx z);

}  // namespace twoscale
