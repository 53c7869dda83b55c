#include "twoscale/pointmodel.hpp"

#include <cmath>
#include <stdexcept>

namespace twoscale {

using namespace std::complex_literals;

PointInteraction PointInteraction::connected(double gamma1, double gamma2)
{
    if (gamma1 == 0.0 || !std::isfinite(gamma1) || !std::isfinite(gamma2))
        throw std::invalid_argument("point interaction: need finite gamma1 != 0");
    return {Kind::Connected, gamma1, gamma2};
}

PointInteraction PointInteraction::dirichlet_decoupled()
{
    return {Kind::DirichletDecoupled, 0.0, 0.0};
}

double unitarity_defect(const ScatteringData& sd)
{
    return std::abs(std::norm(sd.t_amp) + std::norm(sd.r_left) - 1.0);
}

PointInteraction limit_operator(const PiecewisePotential& phi, const PiecewisePotential& psi,
                                double alpha, double beta, const Regime& regime, double tol)
{
    if (!(tol > 0.0))
        throw std::invalid_argument("limit_operator: tol must be positive");
    if (!is_resonant(phi, alpha, tol))
        return PointInteraction::dirichlet_decoupled();
    const auto h = half_bound_state(phi, alpha, tol);
    return PointInteraction::connected(h.theta, beta * omega(h, psi, regime));
}

ScatteringData scattering_point(const PointInteraction& pi, double k)
{
    if (!(k > 0.0) || !std::isfinite(k))
        throw std::invalid_argument("scattering_point: k must be positive");
    ScatteringData sd;
    sd.k = k;
    if (!pi.is_connected()) {
        sd.t_amp = sd.t_right = 0.0;
        sd.r_left = sd.r_right = -1.0;
        sd.unitarity_defect = unitarity_defect(sd);
        return sd;
    }
    const double g1 = pi.gamma1();
    const double g2 = pi.gamma2();
    const cplx ik = 1i * k;
    const cplx den = ik * (1.0 + g1 * g1) - g1 * g2;
    sd.t_amp = 2.0 * ik * g1 / den;
    sd.t_right = sd.t_amp;
    sd.r_left = (ik * (1.0 - g1 * g1) + g1 * g2) / den;
    sd.r_right = (ik * (g1 * g1 - 1.0) + g1 * g2) / den;
    sd.unitarity_defect = unitarity_defect(sd);
    return sd;
}

cplx decaying_root(cplx z)
{
    cplx w = std::sqrt(z);
    if (w.imag() < 0.0)
        w = -w;
    return w;
}

PointResolvent resolvent_point(const PointInteraction& pi, cplx z, std::span<const double> grid,
                               std::span<const cplx> f)
{
    if (z.imag() == 0.0)
        throw std::invalid_argument("resolvent_point: z must be non-real");
    if (grid.size() != f.size() || grid.size() < 3)
        throw std::invalid_argument("resolvent_point: grid/sample size mismatch");
    const std::size_t n = grid.size();
    const double h = (grid.back() - grid.front()) / static_cast<double>(n - 1);
    std::size_t centre = n;
    for (std::size_t j = 0; j < n; ++j) {
        if (std::abs(grid[j] - (grid.front() + h * j)) > 1e-9 * h)
            throw std::invalid_argument("resolvent_point: grid must be uniform");
        if (std::abs(grid[j]) <= 1e-12 * h)
            centre = j;
    }
    if (centre == n)
        throw std::invalid_argument("resolvent_point: grid needs a node at 0");

    const cplx w = decaying_root(z);
    const cplx step = std::exp(1i * w * h);  // |step| < 1

    // F_j = int_{x_0}^{x_j} e^{iw(x_j - s)} f(s) ds, G_j = int_{x_j}^{x_n} e^{iw(s - x_j)} f(s) ds
    std::vector<cplx> fwd(n, 0.0), bwd(n, 0.0);
    for (std::size_t j = 1; j < n; ++j)
        fwd[j] = fwd[j - 1] * step + 0.5 * h * (step * f[j - 1] + f[j]);
    for (std::size_t j = n - 1; j-- > 0;)
        bwd[j] = bwd[j + 1] * step + 0.5 * h * (f[j] + step * f[j + 1]);

    const cplx pref = 1i / (2.0 * w);
    std::vector<cplx> free(n);
    for (std::size_t j = 0; j < n; ++j)
        free[j] = pref * (fwd[j] + bwd[j]);
    const cplx y0 = free[centre];
    const cplx dy0 = -0.5 * (fwd[centre] - bwd[centre]);

    cplx c_minus = -y0, c_plus = -y0;
    if (pi.is_connected()) {
        const double g1 = pi.gamma1();
        const double g2 = pi.gamma2();
        // [1, -g1; iw, iw/g1 - g2] (c_plus, c_minus) = rhs
        const cplx a11 = 1.0, a12 = -g1;
        const cplx a21 = 1i * w, a22 = 1i * w / g1 - g2;
        const cplx b1 = (g1 - 1.0) * y0;
        const cplx b2 = (1.0 / g1 - 1.0) * dy0 + g2 * y0;
        const cplx det = a11 * a22 - a12 * a21;
        c_plus = (b1 * a22 - a12 * b2) / det;
        c_minus = (a11 * b2 - a21 * b1) / det;
    }

    PointResolvent out;
    out.grid.assign(grid.begin(), grid.end());
    out.values.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        if (j < centre)
            out.values[j] = free[j] + c_minus * std::exp(-1i * w * grid[j]);
        else if (j > centre)
            out.values[j] = free[j] + c_plus * std::exp(1i * w * grid[j]);
    }
    out.y_minus = y0 + c_minus;
    out.y_plus = y0 + c_plus;
    out.dy_minus = dy0 - 1i * w * c_minus;
    out.dy_plus = dy0 + 1i * w * c_plus;
    if (!pi.is_connected()) {
        out.y_minus = 0.0;
        out.y_plus = 0.0;
    }
    out.values[centre] = out.y_minus;
    return out;
}

}  // namespace twoscale
