#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "twoscale/potential.hpp"

namespace testing {

inline std::mt19937_64& rng()
{
    static std::mt19937_64 gen(20240611);
    return gen;
}

inline double uniform(double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline int uniform_int(int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng());
}

/// Random class-P potential: 1..6 pieces of degree <= max_degree inside [-1, 1].
inline twoscale::PiecewisePotential random_potential(int max_degree = 3, double amplitude = 5.0)
{
    const int pieces = uniform_int(1, 6);
    std::vector<double> bp;
    do {
        bp.clear();
        for (int i = 0; i <= pieces; ++i)
            bp.push_back(uniform(-1.0, 1.0));
        std::sort(bp.begin(), bp.end());
    } while (std::adjacent_find(bp.begin(), bp.end(), [](double a, double b) {
                 return b - a < 1e-3;
             }) != bp.end());
    std::vector<twoscale::Poly3> coeffs;
    for (int i = 0; i < pieces; ++i) {
        twoscale::Poly3 c{};
        for (int d = 0; d <= max_degree; ++d)
            c[d] = uniform(-amplitude, amplitude);
        coeffs.push_back(c);
    }
    return {bp, coeffs};
}

/// Composite Simpson rule on n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n)
{
    if (n % 2)
        ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

/// Simpson applied separately between consecutive kinks, pulled one ulp inside
/// each span so jumps are sampled from the correct side.
inline double simpson_kinked(const std::function<double(double)>& f, std::vector<double> kinks,
                             int n_per_span)
{
    std::sort(kinks.begin(), kinks.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < kinks.size(); ++i)
        if (kinks[i + 1] > kinks[i])
            s += simpson(f, std::nextafter(kinks[i], kinks[i + 1]),
                         std::nextafter(kinks[i + 1], kinks[i]), n_per_span);
    return s;
}

/// Composite 3-point Gauss between consecutive kinks; never samples a kink.
inline double gauss3_kinked(const std::function<double(double)>& f, std::vector<double> kinks,
                            int n_per_span)
{
    std::sort(kinks.begin(), kinks.end());
    const double x = std::sqrt(0.6);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < kinks.size(); ++i) {
        const double h = (kinks[i + 1] - kinks[i]) / n_per_span;
        for (int j = 0; j < n_per_span; ++j) {
            const double c = kinks[i] + (j + 0.5) * h, r = 0.5 * h;
            s += r * (5.0 / 9 * f(c - x * r) + 8.0 / 9 * f(c) + 5.0 / 9 * f(c + x * r));
        }
    }
    return s;
}

}  // namespace testing
