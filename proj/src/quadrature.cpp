#include "twoscale/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace twoscale {

GaussRule gauss_legendre(int n)
{
    if (n < 1)
        throw std::invalid_argument("gauss_legendre: n must be positive");
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

const GaussRule& gauss15()
{
    static const GaussRule rule = gauss_legendre(15);
    return rule;
}

double gauss_composite(const std::function<double(double)>& f, double a, double b, int parts)
{
    const auto& rule = gauss15();
    const double width = (b - a) / parts;
    double total = 0.0;
    for (int p = 0; p < parts; ++p) {
        const double lo = a + p * width;
        const double half = 0.5 * width;
        const double mid = lo + half;
        double s = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            s += rule.weights[i] * f(mid + half * rule.nodes[i]);
        total += half * s;
    }
    return total;
}

double integrate_piecewise_smooth(const std::function<double(double)>& f, double a, double b,
                                  std::span<const double> kinks, double abs_tol,
                                  double initial_part_length)
{
    if (!(b > a))
        return 0.0;
    std::vector<double> cuts{a};
    for (double k : kinks)
        if (k > a && k < b)
            cuts.push_back(k);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const double span_tol = abs_tol / static_cast<double>(cuts.size());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        int parts = std::max(1, static_cast<int>(std::ceil((hi - lo) / initial_part_length)));
        double prev = gauss_composite(f, lo, hi, parts);
        for (int level = 0; level < 12; ++level) {
            parts *= 2;
            const double cur = gauss_composite(f, lo, hi, parts);
            const bool done = std::abs(cur - prev) <= 0.1 * span_tol;
            prev = cur;
            if (done)
                break;
        }
        total += prev;
    }
    return total;
}

}  // namespace twoscale
