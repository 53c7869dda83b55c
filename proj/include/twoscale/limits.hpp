#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "twoscale/ode1d.hpp"
#include "twoscale/pointmodel.hpp"
#include "twoscale/potential.hpp"
#include "twoscale/resonance.hpp"

namespace twoscale {

struct PathPoint {
    double eps = 0.0;
    double nu = 0.0;
    double eta() const { return nu / eps; }
};

/// Maps eps to nu along a limit path.
using PathRule = std::function<double(double)>;

/// nu = sqrt(eps) (slow), nu = lambda eps (comparable), nu = eps^2 (fast).
PathRule default_path_rule(const Regime& r);

std::vector<PathPoint> path_from_eps(std::span<const double> eps_list, const PathRule& rule);

/// Inverse parameterization by nu: eps = nu^2 (slow), nu / lambda, sqrt(nu) (fast).
std::vector<PathPoint> path_from_nu(const Regime& r, std::span<const double> nu_list);

/// One convergence experiment along a path.
struct ConvergenceReport {
    Regime regime;
    std::vector<PathPoint> path;
    std::string parameter = "eps";  // "eps" or "nu": abscissa of the rate fit
    std::string metric_name;
    std::vector<double> values;
    double fitted_rate = 0.0;      // NaN when fewer than 3 usable points
    double reference_rate = 0.0;   // exponent of the bound; NaN when none applies
    std::vector<std::string> warnings;

    std::vector<double> parameter_values() const;
    /// Throws std::invalid_argument naming the first violated invariant.
    void validate() const;
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    int dropped = 0;  // nonpositive ys skipped
};

/// Least-squares line through (log x, log y).
RateFit rate_fit(std::span<const double> xs, std::span<const double> ys);

/// Slope over the last half of the path (at least 3 points); NaN if too short.
double tail_rate(std::span<const double> xs, std::span<const double> ys,
                 std::vector<std::string>* warnings = nullptr);

/// max over k of |t_full - t_limit| along the path (|t_full| when the limit is
/// Dirichlet-decoupled).
ConvergenceReport transmission_sweep(const PiecewisePotential& phi, const PiecewisePotential& psi,
                                     double alpha, double beta, const Regime& regime,
                                     std::span<const double> k_list,
                                     std::span<const double> eps_list, PathRule rule = {},
                                     double tol = kDefaultResonanceTol);

/// (h(t), h'(t)) with h'' = Psi(t) u_alpha(eta t), h(0) = h'(0) = 0.
std::vector<std::pair<double, double>> h_profile(const PiecewisePotential& psi,
                                                 const HalfBoundState& hbs, double eta,
                                                 std::span<const double> t_list);

/// |h'(-1) + int_{R-} Psi| + |h'(1) - theta int_{R+} Psi|.
double h_profile_defect(const PiecewisePotential& psi, const HalfBoundState& hbs, double eta);

// ---------------------------------------------------------------------------
// Discretized resolvent gap

/// Nodes on [-L, L] with a node at 0 and at every breakpoint of the potential.
struct Mesh {
    std::vector<double> nodes;
    std::size_t centre = 0;  // index of x = 0

    static Mesh uniform(double L, double h);
    /// Graded mesh: step `core_step` on the nu scale, min(core_step, eps/8) on
    /// the eps scale, growing linearly with slope `growth` up to `bulk_step`.
    static Mesh graded(double L, double eps, double nu, double core_step, double bulk_step,
                       double growth, std::span<const double> anchors);

    std::size_t size() const { return nodes.size(); }
    /// Dimension of the grid-function space: interior nodes with the origin split in two.
    std::size_t space_dim() const { return nodes.size() - 1; }
    /// Lumped masses of the grid-function space (origin split into half cells).
    std::vector<double> masses() const;
};

/// Three-point discretization of a resolvent with Dirichlet walls at +-L.
/// Each cell carries its exact propagator at energy z, so the scheme reduces
/// to a second-difference scheme with consistent mass for V = 0 and keeps
/// zero-energy resonances of unresolved potential cells.
class DiscreteResolvent {
public:
    static DiscreteResolvent full(const Mesh& mesh, const PiecewisePotential& v, cplx z);
    static DiscreteResolvent point(const Mesh& mesh, const PointInteraction& pi, cplx z);

    /// y = (S - z)^{-1} f on the grid-function space (size mesh.space_dim()).
    std::vector<cplx> apply(std::span<const cplx> f) const;

    const Mesh& mesh() const { return mesh_; }

private:
    DiscreteResolvent() = default;
    void factor();

    Mesh mesh_;
    std::vector<double> mass_;
    std::vector<cplx> lower_, diag_, upper_;  // unknowns: interior nodes
    cplx right_weight_{1.0};                  // value factor on the right of 0
    bool decoupled_ = false;
    // LU with partial pivoting
    std::vector<cplx> lu_l_, lu_d_, lu_u1_, lu_u2_;
    std::vector<int> pivot_;
};

struct GapOptions {
    double L = 20.0;
    double h = 0.0;         // step on the nu scale; 0 selects nu / 8
    int n_iter = 200;
    double rel_tol = 1e-6;  // power-iteration stagnation
    double bulk_step = 1.0 / 32.0;
    double growth = 0.1;
};

struct GapEstimate {
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
    std::size_t mesh_nodes = 0;
    std::vector<std::string> warnings;
};

/// Estimate of || (S_eps,nu - z)^{-1} - (S_0 - z)^{-1} || on [-L, L] by power
/// iteration on D^* D; the maximum over two deterministic seed vectors.
GapEstimate resolvent_gap(const PiecewisePotential& phi, const PiecewisePotential& psi,
                          double alpha, double beta, double eps, double nu, const Regime& regime,
                          cplx z, const GapOptions& options = {});

/// Gap along a path, evaluated in parallel, assembled in path order.
ConvergenceReport gap_sweep(const PiecewisePotential& phi, const PiecewisePotential& psi,
                            double alpha, double beta, const Regime& regime,
                            std::vector<PathPoint> path, const std::string& parameter, cplx z,
                            const GapOptions& options = {});

/// Worker count from TWOSCALE_WORKERS, else the hardware concurrency.
unsigned worker_count();

/// Runs fn(0..n-1) on a worker pool; results land in index order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace twoscale
