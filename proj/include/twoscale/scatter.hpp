#pragma once

#include "twoscale/ode1d.hpp"
#include "twoscale/pointmodel.hpp"
#include "twoscale/potential.hpp"

namespace twoscale {

/// Scattering amplitudes of -u'' + V u at energy k^2 for a compactly supported
/// V, phases referenced to the origin.
ScatteringData scattering_from_potential(const PiecewisePotential& v, double k);

/// Scattering by alpha eps^-2 Phi(x/eps) + beta nu^-1 Psi(x/nu).
ScatteringData scattering_full(const PiecewisePotential& phi, const PiecewisePotential& psi,
                               double alpha, double beta, double eps, double nu, double k);

}  // namespace twoscale
