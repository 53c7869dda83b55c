#include "twoscale/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "twoscale/quadrature.hpp"

namespace twoscale {

namespace {

constexpr int kTraceResolution = 512;
constexpr int kMaxRefineIterations = 200;

SolutionTrace neumann_trace(const PiecewisePotential& scaled_phi)
{
    return solve_ivp(scaled_phi, 0.0, std::nullopt, -1.0, 1.0, 0.0, -1.0, 1.0,
                     IvpOptions{kTraceResolution});
}

double c1_norm_of(const SolutionTrace& t)
{
    double umax = 0.0, dmax = 0.0;
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        umax = std::max(umax, std::abs(t.u[i]));
        dmax = std::max(dmax, std::abs(t.du[i]));
    }
    return umax + dmax;
}

/// Bracketed root of f on [lo, hi] with f(lo) f(hi) < 0: Illinois-modified
/// secant, falling back to bisection when the bracket stops shrinking.
template <class F>
double refine_root(F&& f, double lo, double hi, double flo, double fhi, double ftol)
{
    int retained = 0;  // +1: lo kept twice, -1: hi kept twice
    double last_width = hi - lo;
    for (int it = 0; it < kMaxRefineIterations; ++it) {
        double x = hi - fhi * (hi - lo) / (fhi - flo);
        if (!(x > lo && x < hi) || (it % 3 == 2 && hi - lo > 0.5 * last_width))
            x = 0.5 * (lo + hi);
        if (it % 3 == 2)
            last_width = hi - lo;
        const double fx = f(x);
        if (std::abs(fx) <= ftol)
            return x;
        if ((fx < 0) == (flo < 0)) {
            lo = x;
            flo = fx;
            if (retained == -1)
                fhi *= 0.5;
            retained = -1;
        } else {
            hi = x;
            fhi = fx;
            if (retained == 1)
                flo *= 0.5;
            retained = 1;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                           std::max({std::abs(lo), std::abs(hi), 1e-300}))
            break;
    }
    return std::abs(flo) < std::abs(fhi) ? lo : hi;
}

}  // namespace

Regime Regime::comparable(double lambda)
{
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("regime: comparable needs lambda > 0");
    return {Kind::Comparable, lambda};
}

std::string to_string(const Regime& r)
{
    switch (r.kind) {
    case Regime::Kind::SlowDelta:
        return "slow";
    case Regime::Kind::FastDelta:
        return "fast";
    case Regime::Kind::Comparable: {
        std::ostringstream os;
        os.precision(17);
        os << "comparable(" << r.lambda << ")";
        return os.str();
    }
    }
    return "unknown";
}

Regime parse_regime(const std::string& text, double lambda)
{
    if (text == "slow")
        return Regime::slow_delta();
    if (text == "fast")
        return Regime::fast_delta();
    if (text == "comparable")
        return Regime::comparable(lambda);
    const std::string prefix = "comparable(";
    if (text.rfind(prefix, 0) == 0 && text.back() == ')') {
        const std::string inner = text.substr(prefix.size(), text.size() - prefix.size() - 1);
        std::size_t used = 0;
        const double value = std::stod(inner, &used);
        if (used != inner.size())
            throw std::invalid_argument("regime: bad lambda in '" + text + "'");
        return Regime::comparable(value);
    }
    throw std::invalid_argument("regime: unknown regime '" + text + "'");
}

NotResonant::NotResonant(double alpha, double defect)
    : std::runtime_error([&] {
          std::ostringstream os;
          os.precision(17);
          os << "alpha = " << alpha << " is not resonant (relative shooting defect " << defect
             << ")";
          return os.str();
      }()),
      alpha_(alpha), defect_(defect)
{
}

ShootResult shoot(const PiecewisePotential& phi, double alpha)
{
    const auto m = transfer_matrix(phi.scaled(alpha), 0.0, -1.0, 1.0);
    return {m.m.m11.real(), m.m.m21.real()};
}

ResonanceScan find_resonances(const PiecewisePotential& phi, double alpha_min, double alpha_max,
                              int scan_points)
{
    if (!(alpha_min < alpha_max))
        throw std::invalid_argument("find_resonances: need alpha_min < alpha_max");
    if (scan_points < 2)
        throw std::invalid_argument("find_resonances: need at least 2 scan points");

    auto du1 = [&](double a) { return shoot(phi, a).du1; };
    auto ftol = [&](double a) { return 1e-12 * std::max(1.0, std::abs(shoot(phi, a).u1)); };

    const int n = scan_points;
    std::vector<double> grid(n), vals(n);
    for (int j = 0; j < n; ++j) {
        grid[j] = j == n - 1 ? alpha_max : alpha_min + (alpha_max - alpha_min) * j / (n - 1);
        vals[j] = du1(grid[j]);
    }

    ResonanceScan out;
    auto add_bracket = [&](double lo, double hi, double flo, double fhi) {
        out.alphas.push_back(refine_root(du1, lo, hi, flo, fhi, ftol(0.5 * (lo + hi))));
    };

    for (int j = 0; j < n; ++j) {
        if (vals[j] == 0.0)
            out.alphas.push_back(grid[j]);
        if (j + 1 < n && vals[j] != 0.0 && vals[j + 1] != 0.0 && (vals[j] < 0) != (vals[j + 1] < 0))
            add_bracket(grid[j], grid[j + 1], vals[j], vals[j + 1]);
    }

    // Cells without a sign change may still hold two roots. Probe each midpoint:
    // a sign flip there splits the cell, a dip toward zero marks it as suspect.
    // Cells around 0 are skipped since 0 is always reported.
    for (int j = 0; j + 1 < n; ++j) {
        const double flo = vals[j], fhi = vals[j + 1];
        if (flo == 0.0 || fhi == 0.0 || (flo < 0) != (fhi < 0))
            continue;
        const double lo = grid[j], hi = grid[j + 1];
        if (lo <= 0.0 && hi >= 0.0)
            continue;
        const double mid = 0.5 * (lo + hi);
        const double fm = du1(mid);
        if (fm == 0.0) {
            out.alphas.push_back(mid);
        } else if ((fm < 0) != (flo < 0)) {
            add_bracket(lo, mid, flo, fm);
            add_bracket(mid, hi, fm, fhi);
        } else if (std::abs(fm) < std::min(std::abs(flo), std::abs(fhi))) {
            out.suspect_cells.emplace_back(lo, hi);
        }
    }

    if (alpha_min <= 0.0 && alpha_max >= 0.0)
        out.alphas.push_back(0.0);

    std::sort(out.alphas.begin(), out.alphas.end());
    std::vector<double> merged;
    for (double a : out.alphas) {
        if (!merged.empty() && std::abs(a - merged.back()) <= 1e-9 * (1.0 + std::abs(a))) {
            if (a == 0.0)
                merged.back() = 0.0;
            continue;
        }
        merged.push_back(a);
    }
    for (double& a : merged)
        if (std::abs(a) <= 1e-9)
            a = 0.0;
    out.alphas = std::move(merged);
    return out;
}

double HalfBoundState::value(double x) const
{
    if (x <= -1.0)
        return 1.0;
    if (x >= 1.0)
        return theta;
    const auto& nodes = trace.nodes;
    auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    const auto j = static_cast<std::size_t>(it - nodes.begin()) - 1;
    if (nodes[j] == x)
        return trace.u[j].real();
    const auto m = transfer_matrix(potential, 0.0, nodes[j], x);
    return m.apply(trace.u[j], trace.du[j])[0].real();
}

double HalfBoundState::derivative(double x) const
{
    if (x < -1.0 || x > 1.0)
        return 0.0;
    const auto& nodes = trace.nodes;
    auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    const auto j = std::min<std::size_t>(it - nodes.begin(), nodes.size()) - 1;
    if (nodes[j] == x)
        return trace.du[j].real();
    const auto m = transfer_matrix(potential, 0.0, nodes[j], x);
    return m.apply(trace.u[j], trace.du[j])[1].real();
}

double HalfBoundState::sup_norm() const
{
    double best = std::max(1.0, std::abs(theta));
    for (const auto& u : trace.u)
        best = std::max(best, std::abs(u));
    return best;
}

double HalfBoundState::c1_norm() const { return c1_norm_of(trace); }

double resonance_defect(const PiecewisePotential& phi, double alpha)
{
    const auto trace = neumann_trace(phi.scaled(alpha));
    return std::abs(trace.du.back()) / c1_norm_of(trace);
}

bool is_resonant(const PiecewisePotential& phi, double alpha, double tol)
{
    return resonance_defect(phi, alpha) <= tol;
}

HalfBoundState half_bound_state(const PiecewisePotential& phi, double alpha, double tol)
{
    if (!phi.is_class_p())
        throw std::invalid_argument("half_bound_state: Phi must be supported in [-1, 1]");
    HalfBoundState h;
    h.alpha = alpha;
    h.potential = phi.scaled(alpha);
    h.trace = neumann_trace(h.potential);
    h.residual = std::abs(h.trace.du.back());
    const double defect = h.residual / c1_norm_of(h.trace);
    if (defect > tol)
        throw NotResonant(alpha, defect);
    h.theta = h.trace.u.back().real();
    if (h.theta == 0.0)
        throw NotResonant(alpha, defect);
    h.u_at_zero = h.value(0.0);
    return h;
}

double zeta(const HalfBoundState& h, const PiecewisePotential& psi)
{
    return h.theta * positive_mass(psi) + negative_mass(psi) / h.theta;
}

double kappa(const HalfBoundState& h, const PiecewisePotential& psi, double lambda)
{
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("kappa: lambda must be positive");
    if (psi.empty())
        return 0.0;
    std::vector<double> kinks = psi.breakpoints();
    for (double b : h.potential.breakpoints())
        kinks.push_back(b / lambda);
    kinks.push_back(-1.0 / lambda);
    kinks.push_back(1.0 / lambda);
    kinks.push_back(0.0);

    const double wave = lambda * std::sqrt(h.potential.sup_norm()) + 1.0;
    auto integrand = [&](double t) {
        const double u = h.value(lambda * t);
        return psi(t) * u * u;
    };
    // u(lambda t) varies only on |t| < 1/lambda; outside it is a constant
    const auto [a, b] = psi.support();
    const double w = 1.0 / lambda;
    const double inner_lo = std::clamp(-w, a, b), inner_hi = std::clamp(w, a, b);
    const double total =
        integrate_piecewise_smooth(integrand, a, inner_lo, kinks, 1e-11, 1.0) +
        integrate_piecewise_smooth(integrand, inner_lo, inner_hi, kinks, 1e-11, 1.0 / wave) +
        integrate_piecewise_smooth(integrand, inner_hi, b, kinks, 1e-11, 1.0);
    return total / h.theta;
}

double mu(const HalfBoundState& h, const PiecewisePotential& psi)
{
    return h.u_at_zero * h.u_at_zero * moment(psi, 0) / h.theta;
}

double omega(const HalfBoundState& h, const PiecewisePotential& psi, const Regime& r)
{
    switch (r.kind) {
    case Regime::Kind::SlowDelta:
        return zeta(h, psi);
    case Regime::Kind::Comparable:
        return kappa(h, psi, r.lambda);
    case Regime::Kind::FastDelta:
        return mu(h, psi);
    }
    throw std::logic_error("omega: unknown regime");
}

}  // namespace twoscale
