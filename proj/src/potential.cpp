#include "twoscale/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace twoscale {

double eval_poly(const Poly3& c, double t)
{
    return c[0] + t * (c[1] + t * (c[2] + t * c[3]));
}

PiecewisePotential::PiecewisePotential(std::vector<double> breakpoints, std::vector<Poly3> pieces)
    : breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces))
{
    if (breakpoints_.empty() && pieces_.empty())
        return;
    if (breakpoints_.size() < 2 || pieces_.size() + 1 != breakpoints_.size())
        throw std::invalid_argument("potential: need one piece per breakpoint interval");
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        if (!std::isfinite(breakpoints_[i]))
            throw std::invalid_argument("potential: non-finite breakpoint");
        if (i > 0 && !(breakpoints_[i] > breakpoints_[i - 1]))
            throw std::invalid_argument("potential: breakpoints must be strictly increasing");
    }
    for (const auto& c : pieces_)
        for (double v : c)
            if (!std::isfinite(v))
                throw std::invalid_argument("potential: non-finite coefficient");
}

PiecewisePotential PiecewisePotential::indicator(double a, double b, double value)
{
    return PiecewisePotential({a, b}, {Poly3{value, 0.0, 0.0, 0.0}});
}

PiecewisePotential PiecewisePotential::piecewise_constant(std::vector<double> edges,
                                                          std::span<const double> values)
{
    if (edges.size() != values.size() + 1)
        throw std::invalid_argument("potential: need one value per cell");
    std::vector<Poly3> pieces;
    pieces.reserve(values.size());
    for (double v : values)
        pieces.push_back({v, 0.0, 0.0, 0.0});
    return PiecewisePotential(std::move(edges), std::move(pieces));
}

PiecewisePotential PiecewisePotential::from_samples(std::vector<double> edges,
                                                    const std::function<double(double)>& f)
{
    if (edges.size() < 2)
        throw std::invalid_argument("potential: need at least one sample cell");
    std::vector<double> values(edges.size() - 1);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        values[i] = f(0.5 * (edges[i] + edges[i + 1]));
    return piecewise_constant(std::move(edges), values);
}

std::pair<double, double> PiecewisePotential::support() const
{
    if (breakpoints_.empty())
        return {0.0, 0.0};
    return {breakpoints_.front(), breakpoints_.back()};
}

int PiecewisePotential::degree() const
{
    int deg = 0;
    for (const auto& c : pieces_)
        for (int k = 3; k > deg; --k)
            if (c[k] != 0.0) {
                deg = k;
                break;
            }
    return deg;
}

bool PiecewisePotential::is_class_p() const
{
    if (empty())
        return true;
    return breakpoints_.front() >= -1.0 && breakpoints_.back() <= 1.0;
}

std::size_t PiecewisePotential::piece_index(double t) const
{
    if (empty() || t < breakpoints_.front() || t > breakpoints_.back())
        return npos;
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    auto idx = static_cast<std::size_t>(it - breakpoints_.begin());
    return std::min(idx, pieces_.size()) - 1;
}

double PiecewisePotential::operator()(double t) const
{
    const auto i = piece_index(t);
    return i == npos ? 0.0 : eval_poly(pieces_[i], t);
}

PiecewisePotential PiecewisePotential::scaled(double factor) const
{
    auto pieces = pieces_;
    for (auto& c : pieces)
        for (double& v : c)
            v *= factor;
    return PiecewisePotential(breakpoints_, std::move(pieces));
}

PiecewisePotential PiecewisePotential::dilated(double length, double amplitude) const
{
    if (!(length > 0.0) || !std::isfinite(length))
        throw std::invalid_argument("potential: dilation length must be positive");
    auto bps = breakpoints_;
    for (double& b : bps)
        b *= length;
    auto pieces = pieces_;
    for (auto& c : pieces) {
        double f = amplitude;
        for (double& v : c) {
            v *= f;
            f /= length;
        }
    }
    return PiecewisePotential(std::move(bps), std::move(pieces));
}

double PiecewisePotential::sup_norm() const
{
    double best = 0.0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const auto& c = pieces_[i];
        const double a = breakpoints_[i];
        const double b = breakpoints_[i + 1];
        best = std::max({best, std::abs(eval_poly(c, a)), std::abs(eval_poly(c, b))});
        // critical points of the cubic: c1 + 2 c2 t + 3 c3 t^2 = 0
        const double qa = 3.0 * c[3], qb = 2.0 * c[2], qc = c[1];
        std::vector<double> crit;
        if (qa != 0.0) {
            const double disc = qb * qb - 4.0 * qa * qc;
            if (disc >= 0.0) {
                const double s = std::sqrt(disc);
                crit.push_back((-qb + s) / (2.0 * qa));
                crit.push_back((-qb - s) / (2.0 * qa));
            }
        } else if (qb != 0.0) {
            crit.push_back(-qc / qb);
        }
        for (double t : crit)
            if (t > a && t < b)
                best = std::max(best, std::abs(eval_poly(c, t)));
    }
    return best;
}

double moment(const PiecewisePotential& p, int n, double lo, double hi)
{
    if (n < 0 || n > 4)
        throw std::invalid_argument("moment: unsupported order " + std::to_string(n));
    double total = 0.0;
    const auto& bps = p.breakpoints();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double a = std::max(bps[i], lo);
        const double b = std::min(bps[i + 1], hi);
        if (!(b > a))
            continue;
        const auto& c = p.pieces()[i];
        for (int k = 0; k < 4; ++k) {
            if (c[k] == 0.0)
                continue;
            const int e = n + k + 1;
            total += c[k] * (std::pow(b, e) - std::pow(a, e)) / e;
        }
    }
    return total;
}

double moment(const PiecewisePotential& p, int n)
{
    const auto [a, b] = p.support();
    return moment(p, n, a, b);
}

double positive_mass(const PiecewisePotential& p)
{
    return moment(p, 0, 0.0, std::max(0.0, p.support().second));
}

double negative_mass(const PiecewisePotential& p)
{
    return moment(p, 0, std::min(0.0, p.support().first), 0.0);
}

PiecewisePotential add(const PiecewisePotential& a, const PiecewisePotential& b, double merge_tol)
{
    if (a.empty())
        return b;
    if (b.empty())
        return a;
    std::vector<double> all = a.breakpoints();
    all.insert(all.end(), b.breakpoints().begin(), b.breakpoints().end());
    std::sort(all.begin(), all.end());
    std::vector<double> merged;
    for (double x : all)
        if (merged.empty() || x - merged.back() > merge_tol)
            merged.push_back(x);
    if (merged.size() < 2)
        throw std::invalid_argument("potential: degenerate support after merge");

    std::vector<Poly3> pieces(merged.size() - 1);
    for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
        const double mid = 0.5 * (merged[i] + merged[i + 1]);
        Poly3 sum{};
        for (const auto* src : {&a, &b}) {
            const auto j = src->piece_index(mid);
            if (j == PiecewisePotential::npos)
                continue;
            for (int k = 0; k < 4; ++k)
                sum[k] += src->pieces()[j][k];
        }
        pieces[i] = sum;
    }
    return PiecewisePotential(std::move(merged), std::move(pieces));
}

PiecewisePotential assemble_scaled(const PiecewisePotential& phi, const PiecewisePotential& psi,
                                   double alpha, double beta, double eps, double nu)
{
    if (!(eps > 0.0) || !(nu > 0.0) || !std::isfinite(eps) || !std::isfinite(nu))
        throw std::invalid_argument("assemble_scaled: scales must be positive");
    if (!phi.is_class_p() || !psi.is_class_p())
        throw std::invalid_argument("assemble_scaled: Phi and Psi must be supported in [-1, 1]");
    const auto outer = phi.empty() ? PiecewisePotential{} : phi.dilated(eps, alpha / (eps * eps));
    const auto inner = psi.empty() ? PiecewisePotential{} : psi.dilated(nu, beta / nu);
    return add(outer, inner, 1e-15 * std::max(eps, nu));
}

namespace library {

PiecewisePotential well() { return PiecewisePotential::indicator(-1.0, 1.0, 1.0); }

PiecewisePotential dip()
{
    return PiecewisePotential({-1.0, 0.0, 1.0}, {Poly3{1.0, 0, 0, 0}, Poly3{-1.0, 0, 0, 0}});
}

PiecewisePotential boxdelta() { return PiecewisePotential::indicator(-1.0, 1.0, 0.5); }

}  // namespace library

}  // namespace twoscale
