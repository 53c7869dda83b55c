#include "twoscale/scatter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace twoscale {

using namespace std::complex_literals;

namespace {

/// Solves [a11 a12; a21 a22] (x, y) = (b1, b2).
std::pair<cplx, cplx> solve2(cplx a11, cplx a12, cplx a21, cplx a22, cplx b1, cplx b2)
{
    const cplx det = a11 * a22 - a12 * a21;
    return {(b1 * a22 - a12 * b2) / det, (a11 * b2 - a21 * b1) / det};
}

bool is_zero(const PiecewisePotential& v)
{
    for (const auto& c : v.pieces())
        for (double x : c)
            if (x != 0.0)
                return false;
    return true;
}

}  // namespace

ScatteringData scattering_from_potential(const PiecewisePotential& v, double k)
{
    if (!(k > 0.0) || !std::isfinite(k))
        throw std::invalid_argument("scattering: k must be positive");
    ScatteringData sd;
    sd.k = k;
    if (v.empty() || is_zero(v))
        return sd;

    const auto [lo, hi] = v.support();
    const double a = std::max({std::abs(lo), std::abs(hi), 1e-300});
    const Mat2 m = transfer_matrix(v, k * k, -a, a).m;
    const cplx ik = 1i * k;
    const cplx A = std::exp(-ik * a);
    const cplx B = std::exp(ik * a);

    // left incidence: e^{ikx} + r e^{-ikx} | t e^{ikx}
    {
        const auto [r, t] = solve2(B * (m.m11 - ik * m.m12), -B, B * (m.m21 - ik * m.m22),
                                   -ik * B, -A * (m.m11 + ik * m.m12), -A * (m.m21 + ik * m.m22));
        sd.r_left = r;
        sd.t_amp = t;
    }
    // right incidence: t' e^{-ikx} | e^{-ikx} + r' e^{ikx}
    {
        const auto [t, r] = solve2(B * (m.m11 - ik * m.m12), -B, B * (m.m21 - ik * m.m22),
                                   -ik * B, A, -ik * A);
        sd.t_right = t;
        sd.r_right = r;
    }
    sd.unitarity_defect = unitarity_defect(sd);
    return sd;
}

ScatteringData scattering_full(const PiecewisePotential& phi, const PiecewisePotential& psi,
                               double alpha, double beta, double eps, double nu, double k)
{
    if (!(k > 0.0))
        throw std::invalid_argument("scattering_full: k must be positive");
    return scattering_from_potential(assemble_scaled(phi, psi, alpha, beta, eps, nu), k);
}

}  // namespace twoscale
