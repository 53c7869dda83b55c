#include "twoscale/limits.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "twoscale/quadrature.hpp"
#include "twoscale/scatter.hpp"

namespace twoscale {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double reference_exponent(const Regime& r)
{
    // gap <= C (nu^1/2 + 1/eta) resp. C (eps^1/2 + eta)
    return r.kind == Regime::Kind::Comparable ? kNaN : 0.5;
}

}  // namespace

// ---------------------------------------------------------------------------
// paths and reports

PathRule default_path_rule(const Regime& r)
{
    switch (r.kind) {
    case Regime::Kind::SlowDelta:
        return [](double eps) { return std::sqrt(eps); };
    case Regime::Kind::Comparable:
        return [lambda = r.lambda](double eps) { return lambda * eps; };
    case Regime::Kind::FastDelta:
        return [](double eps) { return eps * eps; };
    }
    throw std::logic_error("default_path_rule: unknown regime");
}

std::vector<PathPoint> path_from_eps(std::span<const double> eps_list, const PathRule& rule)
{
    std::vector<PathPoint> path;
    path.reserve(eps_list.size());
    for (double e : eps_list)
        path.push_back({e, rule(e)});
    return path;
}

std::vector<PathPoint> path_from_nu(const Regime& r, std::span<const double> nu_list)
{
    std::vector<PathPoint> path;
    path.reserve(nu_list.size());
    for (double nu : nu_list) {
        double eps = 0.0;
        switch (r.kind) {
        case Regime::Kind::SlowDelta:
            eps = nu * nu;
            break;
        case Regime::Kind::Comparable:
            eps = nu / r.lambda;
            break;
        case Regime::Kind::FastDelta:
            eps = std::sqrt(nu);
            break;
        }
        path.push_back({eps, nu});
    }
    return path;
}

std::vector<double> ConvergenceReport::parameter_values() const
{
    std::vector<double> xs;
    xs.reserve(path.size());
    for (const auto& p : path)
        xs.push_back(parameter == "nu" ? p.nu : p.eps);
    return xs;
}

void ConvergenceReport::validate() const
{
    if (regime.kind == Regime::Kind::Comparable && !(regime.lambda > 0.0))
        throw std::invalid_argument("report: comparable regime needs lambda > 0");
    if (parameter != "eps" && parameter != "nu")
        throw std::invalid_argument("report: parameter must be eps or nu");
    if (path.empty())
        throw std::invalid_argument("report: empty path");
    if (path.size() != values.size())
        throw std::invalid_argument("report: path and values differ in length");
    for (const auto& p : path)
        if (!(p.eps > 0.0) || !(p.nu > 0.0) || !std::isfinite(p.eps) || !std::isfinite(p.nu))
            throw std::invalid_argument("report: path scales must be positive and finite");
    for (double v : values)
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("report: values must be finite and nonnegative");
    const auto xs = parameter_values();
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] < xs[i - 1]))
            throw std::invalid_argument("report: path parameter must strictly decrease");
}

RateFit rate_fit(std::span<const double> xs, std::span<const double> ys)
{
    if (xs.size() != ys.size())
        throw std::invalid_argument("rate_fit: length mismatch");
    std::vector<double> lx, ly;
    RateFit fit;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0))
            throw std::invalid_argument("rate_fit: abscissae must be positive");
        if (!(ys[i] > 0.0)) {
            ++fit.dropped;
            continue;
        }
        lx.push_back(std::log(xs[i]));
        ly.push_back(std::log(ys[i]));
    }
    if (lx.size() < 3)
        throw std::invalid_argument("rate_fit: fewer than 3 usable points");
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0)
        throw std::invalid_argument("rate_fit: abscissae are all equal");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

double tail_rate(std::span<const double> xs, std::span<const double> ys,
                 std::vector<std::string>* warnings)
{
    const std::size_t n = xs.size();
    if (n < 3) {
        if (warnings)
            warnings->push_back("rate fit skipped: fewer than 3 path points");
        return kNaN;
    }
    const std::size_t take = std::max<std::size_t>(3, (n + 1) / 2);
    const std::size_t first = n - take;
    try {
        const auto fit = rate_fit(xs.subspan(first), ys.subspan(first));
        if (fit.dropped > 0 && warnings)
            warnings->push_back("rate fit dropped " + std::to_string(fit.dropped) +
                                " nonpositive value(s)");
        return fit.slope;
    } catch (const std::invalid_argument& e) {
        if (warnings)
            warnings->push_back(std::string("rate fit skipped: ") + e.what());
        return kNaN;
    }
}

// ---------------------------------------------------------------------------
// worker pool

unsigned worker_count()
{
    if (const char* env = std::getenv("TWOSCALE_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn)
{
    const std::size_t workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// transmission sweeps

ConvergenceReport transmission_sweep(const PiecewisePotential& phi, const PiecewisePotential& psi,
                                     double alpha, double beta, const Regime& regime,
                                     std::span<const double> k_list,
                                     std::span<const double> eps_list, PathRule rule, double tol)
{
    if (k_list.empty() || eps_list.empty())
        throw std::invalid_argument("transmission_sweep: empty k or eps list");
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1]))
            throw std::invalid_argument("transmission_sweep: eps list must strictly decrease");
    if (!rule)
        rule = default_path_rule(regime);

    ConvergenceReport report;
    report.regime = regime;
    report.path = path_from_eps(eps_list, rule);
    report.parameter = "eps";
    report.metric_name = "transmission_gap";
    report.reference_rate = reference_exponent(regime);

    const auto limit = limit_operator(phi, psi, alpha, beta, regime, tol);
    std::vector<cplx> t_limit;
    for (double k : k_list)
        t_limit.push_back(scattering_point(limit, k).t_amp);

    report.values.assign(report.path.size(), 0.0);
    parallel_for(report.path.size(), [&](std::size_t i) {
        double worst = 0.0;
        for (std::size_t j = 0; j < k_list.size(); ++j) {
            const auto sd = scattering_full(phi, psi, alpha, beta, report.path[i].eps,
                                            report.path[i].nu, k_list[j]);
            worst = std::max(worst, std::abs(sd.t_amp - t_limit[j]));
        }
        report.values[i] = worst;
    });
    const auto xs = report.parameter_values();
    report.fitted_rate = tail_rate(xs, report.values, &report.warnings);
    return report;
}

// ---------------------------------------------------------------------------
// profile of the delta-scale corrector

std::vector<std::pair<double, double>> h_profile(const PiecewisePotential& psi,
                                                 const HalfBoundState& hbs, double eta,
                                                 std::span<const double> t_list)
{
    if (!(eta > 0.0) || !std::isfinite(eta))
        throw std::invalid_argument("h_profile: eta must be positive");
    std::vector<double> kinks = psi.breakpoints();
    for (double b : hbs.potential.breakpoints())
        kinks.push_back(b / eta);
    kinks.push_back(-1.0 / eta);
    kinks.push_back(1.0 / eta);
    kinks.push_back(0.0);
    const double part = 1.0 / (eta * std::sqrt(hbs.potential.sup_norm()) + 1.0);

    std::vector<std::pair<double, double>> out;
    out.reserve(t_list.size());
    for (double t : t_list) {
        if (t == 0.0) {
            out.emplace_back(0.0, 0.0);
            continue;
        }
        const double lo = std::min(0.0, t), hi = std::max(0.0, t);
        const double sign = t > 0.0 ? 1.0 : -1.0;
        auto g = [&](double s) { return psi(s) * hbs.value(eta * s); };
        auto gh = [&](double s) { return (t - s) * psi(s) * hbs.value(eta * s); };
        // the profile of u(eta s) lives on |s| < 1/eta
        auto split = [&](const std::function<double(double)>& f) {
            const double w = 1.0 / eta;
            const double mlo = std::clamp(-w, lo, hi), mhi = std::clamp(w, lo, hi);
            return integrate_piecewise_smooth(f, lo, mlo, kinks, 1e-11, 1.0) +
                   integrate_piecewise_smooth(f, mlo, mhi, kinks, 1e-11, part) +
                   integrate_piecewise_smooth(f, mhi, hi, kinks, 1e-11, 1.0);
        };
        const double dh = sign * split(g);
        const double hv = sign * split(gh);
        out.emplace_back(hv, dh);
    }
    return out;
}

double h_profile_defect(const PiecewisePotential& psi, const HalfBoundState& hbs, double eta)
{
    const double ts[] = {-1.0, 1.0};
    const auto prof = h_profile(psi, hbs, eta, ts);
    return std::abs(prof[0].second + negative_mass(psi)) +
           std::abs(prof[1].second - hbs.theta * positive_mass(psi));
}

// ---------------------------------------------------------------------------
// meshes

Mesh Mesh::uniform(double L, double h)
{
    if (!(L > 0.0) || !(h > 0.0))
        throw std::invalid_argument("mesh: L and h must be positive");
    const auto half = static_cast<long>(std::llround(L / h));
    if (half < 1)
        throw std::invalid_argument("mesh: h larger than L");
    Mesh m;
    for (long j = -half; j <= half; ++j)
        m.nodes.push_back(j * h);
    m.centre = static_cast<std::size_t>(half);
    return m;
}

Mesh Mesh::graded(double L, double eps, double nu, double core_step, double bulk_step,
                  double growth, std::span<const double> anchors)
{
    if (!(L > 0.0) || !(eps > 0.0) || !(nu > 0.0) || !(core_step > 0.0) || !(bulk_step > 0.0) ||
        !(growth > 0.0))
        throw std::invalid_argument("mesh: parameters must be positive");
    const double phi_step = std::min(core_step, eps / 8.0);
    auto step = [&](double x) {
        return std::min({bulk_step, phi_step + growth * std::max(0.0, x - eps),
                         core_step + growth * std::max(0.0, x - nu)});
    };
    auto march = [&](std::vector<double> stops) {
        stops.push_back(L);
        std::sort(stops.begin(), stops.end());
        stops.erase(std::remove_if(stops.begin(), stops.end(),
                                   [&](double s) { return !(s > 0.0) || s > L; }),
                    stops.end());
        stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
        std::vector<double> xs{0.0};
        double x = 0.0;
        std::size_t next = 0;
        while (x < L) {
            const double s = step(x);
            if (x + s >= stops[next] - 0.25 * s)
                x = stops[next++];
            else
                x += s;
            xs.push_back(x);
        }
        return xs;
    };
    std::vector<double> pos, neg;
    for (double a : anchors) {
        if (a > 0.0)
            pos.push_back(a);
        else if (a < 0.0)
            neg.push_back(-a);
    }
    const auto right = march(pos);
    const auto left = march(neg);
    Mesh m;
    for (std::size_t i = left.size(); i-- > 1;)
        m.nodes.push_back(-left[i]);
    m.centre = m.nodes.size();
    m.nodes.insert(m.nodes.end(), right.begin(), right.end());
    return m;
}

std::vector<double> Mesh::masses() const
{
    const std::size_t n = nodes.size();
    std::vector<double> m(space_dim());
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (i < centre)
            m[i - 1] = 0.5 * (nodes[i + 1] - nodes[i - 1]);
        else if (i > centre)
            m[i] = 0.5 * (nodes[i + 1] - nodes[i - 1]);
    }
    m[centre - 1] = 0.5 * (nodes[centre] - nodes[centre - 1]);
    m[centre] = 0.5 * (nodes[centre + 1] - nodes[centre]);
    return m;
}

// ---------------------------------------------------------------------------
// discrete resolvents

namespace {

struct CellStiffness {
    cplx k00, k01, k11;
};

CellStiffness cell_stiffness(const Mat2& m)
{
    return {m.m11 / m.m12, -1.0 / m.m12, m.m22 / m.m12};
}

}  // namespace

DiscreteResolvent DiscreteResolvent::full(const Mesh& mesh, const PiecewisePotential& v, cplx z)
{
    DiscreteResolvent r;
    r.mesh_ = mesh;
    r.mass_ = mesh.masses();
    const auto& x = mesh.nodes;
    const std::size_t n = x.size();
    const std::size_t unknowns = n - 2;
    r.diag_.assign(unknowns, 0.0);
    r.lower_.assign(unknowns - 1, 0.0);
    r.upper_.assign(unknowns - 1, 0.0);
    const auto [s0, s1] = v.support();
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const bool touches = !v.empty() && x[j + 1] > s0 && x[j] < s1;
        const Mat2 m = touches ? transfer_matrix(v, z, x[j], x[j + 1]).m
                               : constant_propagator(-z, x[j + 1] - x[j]);
        const auto k = cell_stiffness(m);
        if (j >= 1)
            r.diag_[j - 1] += k.k00;
        if (j + 1 <= n - 2)
            r.diag_[j] += k.k11;
        if (j >= 1 && j + 1 <= n - 2) {
            r.upper_[j - 1] = k.k01;
            r.lower_[j - 1] = k.k01;
        }
    }
    r.right_weight_ = 1.0;
    r.factor();
    return r;
}

DiscreteResolvent DiscreteResolvent::point(const Mesh& mesh, const PointInteraction& pi, cplx z)
{
    DiscreteResolvent r;
    r.mesh_ = mesh;
    r.mass_ = mesh.masses();
    const auto& x = mesh.nodes;
    const std::size_t n = x.size();
    const std::size_t c = mesh.centre;
    if (c == 0 || c + 1 >= n)
        throw std::invalid_argument("discrete resolvent: origin must be an interior node");
    const std::size_t unknowns = n - 2;
    r.diag_.assign(unknowns, 0.0);
    r.lower_.assign(unknowns - 1, 0.0);
    r.upper_.assign(unknowns - 1, 0.0);
    const double g1 = pi.is_connected() ? pi.gamma1() : 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        auto k = cell_stiffness(constant_propagator(-z, x[j + 1] - x[j]));
        if (j == c) {
            // basis function at the origin takes the value gamma1 on the right
            k.k00 *= g1 * g1;
            k.k01 *= g1;
        }
        if (j >= 1)
            r.diag_[j - 1] += k.k00;
        if (j + 1 <= n - 2)
            r.diag_[j] += k.k11;
        if (j >= 1 && j + 1 <= n - 2) {
            r.upper_[j - 1] = k.k01;
            r.lower_[j - 1] = k.k01;
        }
    }
    const std::size_t uc = c - 1;
    if (pi.is_connected()) {
        r.diag_[uc] += g1 * pi.gamma2();
        r.right_weight_ = g1;
    } else {
        r.decoupled_ = true;
        r.right_weight_ = 0.0;
        r.diag_[uc] = 1.0;
        if (uc > 0) {
            r.upper_[uc - 1] = 0.0;
            r.lower_[uc - 1] = 0.0;
        }
        if (uc + 1 < unknowns) {
            r.upper_[uc] = 0.0;
            r.lower_[uc] = 0.0;
        }
    }
    r.factor();
    return r;
}

void DiscreteResolvent::factor()
{
    // tridiagonal LU with partial pivoting (LAPACK gttrf layout)
    const std::size_t n = diag_.size();
    lu_l_ = lower_;
    lu_d_ = diag_;
    lu_u1_ = upper_;
    lu_u2_.assign(n > 2 ? n - 2 : 0, 0.0);
    pivot_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        pivot_[i] = static_cast<int>(i);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(lu_d_[i]) >= std::abs(lu_l_[i])) {
            if (lu_d_[i] != 0.0) {
                const cplx fact = lu_l_[i] / lu_d_[i];
                lu_l_[i] = fact;
                lu_d_[i + 1] -= fact * lu_u1_[i];
            }
        } else {
            const cplx fact = lu_d_[i] / lu_l_[i];
            lu_d_[i] = lu_l_[i];
            lu_l_[i] = fact;
            const cplx temp = lu_u1_[i];
            lu_u1_[i] = lu_d_[i + 1];
            lu_d_[i + 1] = temp - fact * lu_d_[i + 1];
            if (i + 2 < n) {
                lu_u2_[i] = lu_u1_[i + 1];
                lu_u1_[i + 1] = -fact * lu_u1_[i + 1];
            }
            pivot_[i] = static_cast<int>(i + 1);
        }
    }
    for (const auto& d : lu_d_)
        if (d == 0.0)
            throw std::runtime_error("discrete resolvent: singular system");
}

std::vector<cplx> DiscreteResolvent::apply(std::span<const cplx> f) const
{
    const std::size_t dim = mesh_.space_dim();
    if (f.size() != dim)
        throw std::invalid_argument("discrete resolvent: input has wrong dimension");
    const std::size_t c = mesh_.centre;
    const std::size_t n = diag_.size();
    const std::size_t uc = c - 1;

    std::vector<cplx> b(n);
    for (std::size_t u = 0; u < n; ++u) {
        const std::size_t node = u + 1;
        if (node < c)
            b[u] = mass_[node - 1] * f[node - 1];
        else if (node > c)
            b[u] = mass_[node] * f[node];
    }
    b[uc] = decoupled_ ? cplx{} : mass_[c - 1] * f[c - 1] + right_weight_ * mass_[c] * f[c];

    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t ip = static_cast<std::size_t>(pivot_[i]);
        const cplx temp = b[2 * i + 1 - ip] - lu_l_[i] * b[ip];
        b[i] = b[ip];
        b[i + 1] = temp;
    }
    b[n - 1] /= lu_d_[n - 1];
    if (n > 1)
        b[n - 2] = (b[n - 2] - lu_u1_[n - 2] * b[n - 1]) / lu_d_[n - 2];
    for (std::size_t i = n - 2; i-- > 0;)
        b[i] = (b[i] - lu_u1_[i] * b[i + 1] - lu_u2_[i] * b[i + 2]) / lu_d_[i];

    std::vector<cplx> y(dim);
    for (std::size_t u = 0; u < n; ++u) {
        const std::size_t node = u + 1;
        if (node < c)
            y[node - 1] = b[u];
        else if (node > c)
            y[node] = b[u];
    }
    y[c - 1] = b[uc];
    y[c] = right_weight_ * b[uc];
    return y;
}

// ---------------------------------------------------------------------------
// resolvent gap

namespace {

double weighted_norm(std::span<const cplx> x, std::span<const double> m)
{
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        s += m[i] * std::norm(x[i]);
    return std::sqrt(s);
}

}  // namespace

GapEstimate resolvent_gap(const PiecewisePotential& phi, const PiecewisePotential& psi,
                          double alpha, double beta, double eps, double nu, const Regime& regime,
                          cplx z, const GapOptions& options)
{
    if (z.imag() == 0.0)
        throw std::invalid_argument("resolvent_gap: z must be non-real");
    if (!(options.L >= 10.0))
        throw std::invalid_argument("resolvent_gap: need L >= 10");
    if (options.n_iter < 20)
        throw std::invalid_argument("resolvent_gap: need n_iter >= 20");
    if (!(eps > 0.0) || !(nu > 0.0))
        throw std::invalid_argument("resolvent_gap: scales must be positive");

    GapEstimate est;
    const double h = options.h > 0.0 ? options.h : nu / 8.0;
    if (h > nu / 8.0 * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "h = " << h << " exceeds nu/8 = " << nu / 8.0 << ": potential under-resolved";
        est.warnings.push_back(os.str());
    }

    const auto v = assemble_scaled(phi, psi, alpha, beta, eps, nu);
    const auto limit = limit_operator(phi, psi, alpha, beta, regime);
    const Mesh mesh = Mesh::graded(options.L, eps, nu, h, std::max(options.bulk_step, h),
                                   options.growth, v.breakpoints());
    est.mesh_nodes = mesh.size();

    const auto full_z = DiscreteResolvent::full(mesh, v, z);
    const auto full_zb = DiscreteResolvent::full(mesh, v, std::conj(z));
    const auto lim_z = DiscreteResolvent::point(mesh, limit, z);
    const auto lim_zb = DiscreteResolvent::point(mesh, limit, std::conj(z));
    const auto mass = mesh.masses();
    const std::size_t dim = mesh.space_dim();

    auto diff = [&](const DiscreteResolvent& a, const DiscreteResolvent& b,
                    std::span<const cplx> x) {
        auto ya = a.apply(x);
        const auto yb = b.apply(x);
        for (std::size_t i = 0; i < dim; ++i)
            ya[i] -= yb[i];
        return ya;
    };

    // mass-weighted positions of the split grid-function space
    std::vector<double> pos(dim);
    for (std::size_t i = 0; i < dim; ++i)
        pos[i] = i < mesh.centre ? mesh.nodes[i + 1] : mesh.nodes[i];

    std::vector<std::vector<cplx>> seeds(2, std::vector<cplx>(dim));
    for (std::size_t i = 0; i < dim; ++i)
        seeds[0][i] = cplx(1.0, 0.5) * std::exp(-pos[i] * pos[i]);
    std::mt19937_64 rng(0x5eedULL);
    std::normal_distribution<double> normal;
    for (auto& s : seeds[1])
        s = cplx(normal(rng), normal(rng));

    est.converged = true;
    for (auto& x : seeds) {
        double nx = weighted_norm(x, mass);
        for (auto& e : x)
            e /= nx;
        double sigma = 0.0, prev = 0.0;
        bool done = false;
        int it = 0;
        for (; it < options.n_iter; ++it) {
            const auto y = diff(full_z, lim_z, x);
            sigma = weighted_norm(y, mass);
            if (it > 0 && std::abs(sigma - prev) <= options.rel_tol * sigma) {
                done = true;
                break;
            }
            if (sigma == 0.0) {
                done = true;
                break;
            }
            x = diff(full_zb, lim_zb, y);
            nx = weighted_norm(x, mass);
            if (nx == 0.0) {
                done = true;
                break;
            }
            for (auto& e : x)
                e /= nx;
            prev = sigma;
        }
        est.iterations = std::max(est.iterations, it + 1);
        est.converged = est.converged && done;
        est.value = std::max(est.value, sigma);
    }
    if (!est.converged)
        est.warnings.push_back("power iteration hit the iteration cap");
    return est;
}

ConvergenceReport gap_sweep(const PiecewisePotential& phi, const PiecewisePotential& psi,
                            double alpha, double beta, const Regime& regime,
                            std::vector<PathPoint> path, const std::string& parameter, cplx z,
                            const GapOptions& options)
{
    if (path.empty())
        throw std::invalid_argument("gap_sweep: empty path");
    ConvergenceReport report;
    report.regime = regime;
    report.path = std::move(path);
    report.parameter = parameter;
    report.metric_name = "resolvent_gap";
    report.reference_rate = reference_exponent(regime);
    report.values.assign(report.path.size(), 0.0);

    std::vector<GapEstimate> estimates(report.path.size());
    parallel_for(report.path.size(), [&](std::size_t i) {
        GapOptions o = options;
        if (!(o.h > 0.0))
            o.h = report.path[i].nu / 8.0;
        estimates[i] = resolvent_gap(phi, psi, alpha, beta, report.path[i].eps,
                                     report.path[i].nu, regime, z, o);
    });
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        report.values[i] = estimates[i].value;
        for (const auto& w : estimates[i].warnings)
            report.warnings.push_back("point " + std::to_string(i) + ": " + w);
    }
    const auto xs = report.parameter_values();
    report.fitted_rate = tail_rate(xs, report.values, &report.warnings);
    return report;
}

}  // namespace twoscale
