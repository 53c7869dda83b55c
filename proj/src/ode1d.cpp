#include "twoscale/ode1d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace twoscale {

namespace {

constexpr int kTaylorOrder = 9;        // series through h^9 for u, h^8 for u'
constexpr double kDetTolerance = 1e-13;
constexpr double kPieceTolerance = 1e-12;
constexpr int kMaxHalvings = 14;

using LocalPoly = std::array<cplx, 4>;

/// Coefficients of q(s0 + sigma) - E in powers of sigma.
LocalPoly shift_poly(const Poly3& c, double s0, cplx energy)
{
    // Horner-style Taylor shift
    std::array<double, 4> d = c;
    for (int i = 0; i < 3; ++i)
        for (int j = 2; j >= i; --j)
            d[j] += s0 * d[j + 1];
    return {cplx(d[0]) - energy, d[1], d[2], d[3]};
}

LocalPoly shift_local(const LocalPoly& w, double h)
{
    LocalPoly d = w;
    for (int i = 0; i < 3; ++i)
        for (int j = 2; j >= i; --j)
            d[j] += h * d[j + 1];
    return d;
}

struct Affine {
    Mat2 m;
    std::array<cplx, 2> p{};
};

/// One Taylor step for u'' = w(sigma) u + f0 + f1 sigma.
std::array<cplx, 2> taylor_step(const LocalPoly& w, cplx f0, cplx f1, double h, cplx u, cplx du)
{
    std::array<cplx, kTaylorOrder + 1> a{};
    a[0] = u;
    a[1] = du;
    for (int n = 0; n + 2 <= kTaylorOrder; ++n) {
        cplx acc = n == 0 ? f0 : (n == 1 ? f1 : cplx{});
        for (int k = 0; k <= std::min(n, 3); ++k)
            acc += w[k] * a[n - k];
        a[n + 2] = acc / double((n + 2) * (n + 1));
    }
    cplx val = a[kTaylorOrder];
    cplx der = double(kTaylorOrder) * a[kTaylorOrder];
    for (int n = kTaylorOrder - 1; n >= 0; --n) {
        val = val * h + a[n];
        if (n >= 1)
            der = der * h + double(n) * a[n];
    }
    return {val, der};
}

Affine taylor_run(const LocalPoly& w0, cplx f0, cplx f1, double length, int steps)
{
    const double h = length / steps;
    std::array<cplx, 2> c1{1.0, 0.0}, c2{0.0, 1.0}, cp{0.0, 0.0};
    LocalPoly w = w0;
    cplx g0 = f0;
    for (int s = 0; s < steps; ++s) {
        c1 = taylor_step(w, 0.0, 0.0, h, c1[0], c1[1]);
        c2 = taylor_step(w, 0.0, 0.0, h, c2[0], c2[1]);
        cp = taylor_step(w, g0, f1, h, cp[0], cp[1]);
        w = shift_local(w, h);
        g0 += f1 * h;
    }
    return {Mat2{c1[0], c2[0], c1[1], c2[1]}, cp};
}

double affine_distance(const Affine& x, const Affine& y)
{
    return std::abs(x.m.m11 - y.m.m11) + std::abs(x.m.m12 - y.m.m12) +
           std::abs(x.m.m21 - y.m.m21) + std::abs(x.m.m22 - y.m.m22) +
           std::abs(x.p[0] - y.p[0]) + std::abs(x.p[1] - y.p[1]);
}

/// Affine propagator over [s0, s1] (signed) for u'' = (poly - E) u + forcing,
/// where `poly` is the potential on the whole segment and the forcing is
/// linear: fmid + slope * (t - tmid).
Affine propagate_segment(const Poly3& poly, bool constant, cplx energy, double s0, double s1,
                         bool forced, double fmid, double slope, double tmid)
{
    const double length = s1 - s0;
    if (constant && !forced)
        return {constant_propagator(cplx(poly[0]) - energy, length), {}};

    const LocalPoly w = shift_poly(poly, s0, energy);
    const cplx f0 = forced ? cplx(fmid + slope * (s0 - tmid)) : cplx{};
    const cplx f1 = forced ? cplx(slope) : cplx{};

    double wmax = 0.0;
    for (double frac : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const double sg = frac * length;
        wmax = std::max(wmax, std::abs(w[0] + sg * (w[1] + sg * (w[2] + sg * w[3]))));
    }
    int steps = std::max(1, static_cast<int>(std::ceil(std::abs(length) * std::sqrt(wmax) / 0.25)));

    Affine prev = taylor_run(w, f0, f1, length, steps);
    for (int halving = 0; halving < kMaxHalvings; ++halving) {
        steps *= 2;
        Affine cur = taylor_run(w, f0, f1, length, steps);
        const double scale = std::max(1.0, cur.m.norm() + std::abs(cur.p[0]) + std::abs(cur.p[1]));
        if (affine_distance(cur, prev) <= kPieceTolerance * scale &&
            det_defect(cur.m) < kDetTolerance)
            return cur;
        prev = cur;
    }
    return prev;
}

Poly3 piece_on(const PiecewisePotential& q, double mid, bool& constant)
{
    const auto i = q.piece_index(mid);
    if (i == PiecewisePotential::npos) {
        constant = true;
        return Poly3{};
    }
    const auto& c = q.pieces()[i];
    constant = c[1] == 0.0 && c[2] == 0.0 && c[3] == 0.0;
    return c;
}

}  // namespace

double Mat2::norm() const
{
    return std::sqrt(std::norm(m11) + std::norm(m12) + std::norm(m21) + std::norm(m22));
}

Mat2 operator*(const Mat2& l, const Mat2& r)
{
    return {l.m11 * r.m11 + l.m12 * r.m21, l.m11 * r.m12 + l.m12 * r.m22,
            l.m21 * r.m11 + l.m22 * r.m21, l.m21 * r.m12 + l.m22 * r.m22};
}

double det_defect(const Mat2& m)
{
    const double size = std::abs(m.m11 * m.m22) + std::abs(m.m12 * m.m21);
    return std::abs(m.det() - 1.0) / std::max(1.0, size);
}

TransferMatrix compose(const TransferMatrix& later, const TransferMatrix& earlier)
{
    if (std::abs(later.a - earlier.b) > 1e-14 * std::max(1.0, std::abs(earlier.b)))
        throw std::invalid_argument("compose: intervals are not adjacent");
    return {later.m * earlier.m, earlier.a, later.b, earlier.energy};
}

Mat2 constant_propagator(cplx w, double length)
{
    const cplx z = w * (length * length);
    cplx c, sl, ws;
    if (std::abs(z) < 1e-4) {
        // cosh(sqrt z), sinh(sqrt z)/sqrt z as power series in z
        c = 1.0 + z * (1.0 / 2 + z * (1.0 / 24 + z * (1.0 / 720 + z / 40320.0)));
        sl = length * (1.0 + z * (1.0 / 6 + z * (1.0 / 120 + z * (1.0 / 5040 + z / 362880.0))));
        ws = w * sl;
    } else {
        const cplx s = std::sqrt(w);
        c = std::cosh(s * length);
        const cplx sh = std::sinh(s * length);
        sl = sh / s;
        ws = s * sh;
    }
    return {c, sl, ws, c};
}

TransferMatrix transfer_matrix(const PiecewisePotential& q, cplx energy, double a, double b)
{
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("transfer_matrix: need a < b");
    if (!std::isfinite(energy.real()) || !std::isfinite(energy.imag()))
        throw std::invalid_argument("transfer_matrix: non-finite energy");

    std::vector<double> cuts{a};
    for (double x : q.breakpoints())
        if (x > a && x < b)
            cuts.push_back(x);
    cuts.push_back(b);

    Mat2 total;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        bool constant = true;
        const Poly3 poly = piece_on(q, 0.5 * (cuts[i] + cuts[i + 1]), constant);
        const Affine seg =
            propagate_segment(poly, constant, energy, cuts[i], cuts[i + 1], false, 0, 0, 0);
        total = seg.m * total;
    }
    return {total, a, b, energy};
}

double SampledFunction::operator()(double t) const
{
    if (grid.empty() || t < grid.front() || t > grid.back())
        return 0.0;
    return segment(t).first;
}

std::pair<double, double> SampledFunction::segment(double t) const
{
    if (grid.size() != values.size())
        throw std::invalid_argument("sampled function: grid/value size mismatch");
    if (grid.size() < 2 || t < grid.front() || t > grid.back())
        return {0.0, 0.0};
    auto it = std::upper_bound(grid.begin(), grid.end(), t);
    std::size_t j = std::min<std::size_t>(it - grid.begin(), grid.size() - 1) - 1;
    const double slope = (values[j + 1] - values[j]) / (grid[j + 1] - grid[j]);
    return {values[j] + slope * (t - grid[j]), slope};
}

SolutionTrace solve_ivp(const PiecewisePotential& q, cplx energy,
                        const std::optional<SampledFunction>& rhs, double t0, cplx u0, cplx du0,
                        double a, double b, IvpOptions options)
{
    if (!(a < b))
        throw std::invalid_argument("solve_ivp: need a < b");
    if (!(t0 >= a && t0 <= b))
        throw std::invalid_argument("solve_ivp: t0 outside [a, b]");

    std::vector<double> nodes{a, b, t0};
    for (double x : q.breakpoints())
        if (x > a && x < b)
            nodes.push_back(x);
    if (rhs)
        for (double x : rhs->grid)
            if (x > a && x < b)
                nodes.push_back(x);
    const int res = std::max(1, options.resolution);
    for (int j = 1; j < res; ++j)
        nodes.push_back(a + (b - a) * j / res);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    SolutionTrace trace;
    trace.nodes = nodes;
    trace.u.assign(nodes.size(), 0.0);
    trace.du.assign(nodes.size(), 0.0);
    const auto start = static_cast<std::size_t>(
        std::lower_bound(nodes.begin(), nodes.end(), t0) - nodes.begin());
    trace.u[start] = u0;
    trace.du[start] = du0;

    auto step = [&](std::size_t from, std::size_t to) {
        const double s0 = nodes[from];
        const double s1 = nodes[to];
        const double mid = 0.5 * (s0 + s1);
        bool constant = true;
        const Poly3 poly = piece_on(q, mid, constant);
        double fmid = 0.0, slope = 0.0;
        bool forced = false;
        if (rhs && !rhs->grid.empty() && mid >= rhs->grid.front() && mid <= rhs->grid.back()) {
            std::tie(fmid, slope) = rhs->segment(mid);
            forced = fmid != 0.0 || slope != 0.0;
        }
        const Affine seg =
            propagate_segment(poly, constant, energy, s0, s1, forced, fmid, slope, mid);
        const auto next = seg.m.apply(trace.u[from], trace.du[from]);
        trace.u[to] = next[0] + seg.p[0];
        trace.du[to] = next[1] + seg.p[1];
    };

    for (std::size_t j = start; j + 1 < nodes.size(); ++j)
        step(j, j + 1);
    for (std::size_t j = start; j > 0; --j)
        step(j, j - 1);
    return trace;
}

}  // namespace twoscale
