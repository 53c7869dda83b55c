#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "twoscale/ode1d.hpp"
#include "twoscale/potential.hpp"

namespace twoscale {

/// How the ratio eta = nu / eps behaves along a limit path.
struct Regime {
    enum class Kind { SlowDelta, Comparable, FastDelta };

    Kind kind = Kind::SlowDelta;
    double lambda = 0.0;  // limit of nu / eps, only for Comparable

    static Regime slow_delta() { return {Kind::SlowDelta, 0.0}; }
    static Regime fast_delta() { return {Kind::FastDelta, 0.0}; }
    static Regime comparable(double lambda);
};

/// "slow", "comparable(<lambda>)" or "fast".
std::string to_string(const Regime& r);
/// Accepts "slow", "fast", "comparable" (needs lambda) and "comparable(<lambda>)".
Regime parse_regime(const std::string& text, double lambda = 0.0);

class NotResonant : public std::runtime_error {
public:
    NotResonant(double alpha, double defect);
    double alpha() const { return alpha_; }
    double defect() const { return defect_; }

private:
    double alpha_;
    double defect_;
};

struct ShootResult {
    double u1 = 0.0;
    double du1 = 0.0;
};

/// (u(1), u'(1)) for -u'' + alpha Phi u = 0 with u(-1) = 1, u'(-1) = 0.
ShootResult shoot(const PiecewisePotential& phi, double alpha);

struct ResonanceScan {
    std::vector<double> alphas;  // sorted
    /// Scan cells where |u'(1)| dips toward zero without a sign change; two
    /// roots may hide there. Increase scan_points to resolve them.
    std::vector<std::pair<double, double>> suspect_cells;
};

ResonanceScan find_resonances(const PiecewisePotential& phi, double alpha_min, double alpha_max,
                              int scan_points);

/// Zero-energy solution normalized to 1 left of the support.
struct HalfBoundState {
    double alpha = 0.0;
    PiecewisePotential potential;  // alpha * Phi
    SolutionTrace trace;           // on [-1, 1]
    double theta = 1.0;            // u(+1)
    double u_at_zero = 1.0;
    double residual = 0.0;         // |u'(1)|

    /// u_alpha on the whole line: 1 left of -1, theta right of +1.
    double value(double x) const;
    /// u_alpha'(x) inside [-1, 1], zero outside.
    double derivative(double x) const;
    /// max |u| over [-1, 1] taken on the trace nodes.
    double sup_norm() const;
    /// max |u| + max |u'| over the trace nodes.
    double c1_norm() const;
};

constexpr double kDefaultResonanceTol = 1e-10;

/// Relative shooting defect |u'(1)| / ||u||_C1 of the Neumann solution.
double resonance_defect(const PiecewisePotential& phi, double alpha);

bool is_resonant(const PiecewisePotential& phi, double alpha, double tol = kDefaultResonanceTol);

/// Throws NotResonant when the relative defect exceeds `tol`.
HalfBoundState half_bound_state(const PiecewisePotential& phi, double alpha,
                                double tol = kDefaultResonanceTol);

double zeta(const HalfBoundState& h, const PiecewisePotential& psi);
double kappa(const HalfBoundState& h, const PiecewisePotential& psi, double lambda);
double mu(const HalfBoundState& h, const PiecewisePotential& psi);

/// Coupling entry of the limit interface matrix (before the factor beta).
double omega(const HalfBoundState& h, const PiecewisePotential& psi, const Regime& r);

}  // namespace twoscale
