#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "support.hpp"
#include "twoscale/limits.hpp"
#include "twoscale/scatter.hpp"

using namespace twoscale;
using namespace std::complex_literals;
using doctest::Approx;

namespace {

const double kAlpha1 = -std::pow(std::numbers::pi / 2, 2);

ConvergenceReport small_report()
{
    ConvergenceReport r;
    r.regime = Regime::slow_delta();
    r.path = {{0.1, 0.3}, {0.05, 0.2}, {0.01, 0.1}};
    r.metric_name = "m";
    r.values = {0.3, 0.2, 0.1};
    return r;
}

// h'(t) for the well state u = -sin(pi x / 2) on [-1, 1] and Psi = 1/2 on [-1, 1], t >= 1/eta
double well_dh(double t, double eta)
{
    return -0.5 * (2.0 / (std::numbers::pi * eta) + t - 1.0 / eta);
}

double well_h(double t, double eta)
{
    const double pi = std::numbers::pi;
    const double w = 1.0 / eta;
    return -(1.0 - 2.0 / pi) / (pi * eta * eta) -
           0.5 * ((2.0 / (pi * eta) - w) * (t - w) + 0.5 * (t * t - w * w));
}

}  // namespace

TEST_CASE("path rules")
{
    const double e[] = {0.04, 0.01};
    const auto slow = path_from_eps(e, default_path_rule(Regime::slow_delta()));
    CHECK(slow[0].nu == Approx(0.2));
    CHECK(slow[1].nu == Approx(0.1));
    CHECK(slow[0].eta() == Approx(5.0));
    const auto comp = path_from_eps(e, default_path_rule(Regime::comparable(3.0)));
    CHECK(comp[1].nu == Approx(0.03));
    CHECK(comp[1].eta() == Approx(3.0));
    const auto fast = path_from_eps(e, default_path_rule(Regime::fast_delta()));
    CHECK(fast[0].nu == Approx(0.0016));

    const double nus[] = {0.2, 0.1};
    for (auto r : {Regime::slow_delta(), Regime::comparable(3.0), Regime::fast_delta()}) {
        const auto p = path_from_nu(r, nus);
        const auto rule = default_path_rule(r);
        for (const auto& pt : p)
            CHECK(rule(pt.eps) == Approx(pt.nu).epsilon(1e-12));
    }
}

TEST_CASE("rate fits")
{
    const std::vector<double> xs{1e-1, 1e-2, 1e-3, 1e-4};
    std::vector<double> lin, half, mixed;
    for (double x : xs) {
        lin.push_back(3.0 * x);
        half.push_back(std::sqrt(x));
        mixed.push_back(x + std::sqrt(x));
    }
    CHECK(rate_fit(xs, lin).slope == Approx(1.0).epsilon(1e-12));
    CHECK(rate_fit(xs, lin).intercept == Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(rate_fit(xs, half).slope == Approx(0.5).epsilon(1e-12));
    const double m = rate_fit(xs, mixed).slope;
    CHECK(m > 0.5);
    CHECK(m < 1.0);

    std::vector<double> with_zero = lin;
    with_zero.push_back(0.0);
    auto xs5 = xs;
    xs5.push_back(1e-5);
    const auto f = rate_fit(xs5, with_zero);
    CHECK(f.dropped == 1);
    CHECK(f.slope == Approx(1.0).epsilon(1e-12));

    const std::vector<double> two{1.0, 2.0};
    CHECK_THROWS_AS(rate_fit(two, two), std::invalid_argument);
    CHECK_THROWS_AS(rate_fit(xs, two), std::invalid_argument);
    const std::vector<double> neg{-1.0, 0.1, 0.01};
    CHECK_THROWS_AS(rate_fit(neg, std::vector<double>{1, 1, 1}), std::invalid_argument);
    const std::vector<double> same{0.1, 0.1, 0.1};
    CHECK_THROWS_AS(rate_fit(same, std::vector<double>{1, 2, 3}), std::invalid_argument);
}

TEST_CASE("tail rate uses the end of the path")
{
    // slope 2 early, slope 1 on the last half
    const std::vector<double> xs{1, 0.5, 0.25, 0.125, 0.0625, 0.03125};
    std::vector<double> ys;
    for (double x : xs)
        ys.push_back(x <= 0.25 ? x : x * x * 4.0);
    std::vector<std::string> w;
    CHECK(tail_rate(xs, ys, &w) == Approx(1.0).epsilon(1e-12));
    CHECK(w.empty());

    const std::vector<double> shortx{1, 0.5}, shorty{1, 0.5};
    CHECK(std::isnan(tail_rate(shortx, shorty, &w)));
    CHECK(w.size() == 1);
    const std::vector<double> zeros(6, 0.0);
    CHECK(std::isnan(tail_rate(xs, zeros)));
}

TEST_CASE("report validation")
{
    CHECK_NOTHROW(small_report().validate());
    auto r = small_report();
    r.values.pop_back();
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
    r = small_report();
    r.values[1] = -1.0;
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
    r = small_report();
    r.values[1] = NAN;
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
    r = small_report();
    r.path[2].eps = 0.06;
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
    r.parameter = "nu";
    CHECK_NOTHROW(r.validate());
    r.parameter = "k";
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
    r = small_report();
    r.path[0].nu = 0.0;
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
    r = small_report();
    r.path.clear();
    r.values.clear();
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
    r = small_report();
    r.regime = Regime{Regime::Kind::Comparable, 0.0};
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
}

TEST_CASE("worker pool")
{
    setenv("TWOSCALE_WORKERS", "3", 1);
    CHECK(worker_count() == 3u);
    std::vector<int> seen(1000, 0);
    std::atomic<int> calls{0};
    parallel_for(seen.size(), [&](std::size_t i) {
        seen[i] += static_cast<int>(i);
        ++calls;
    });
    CHECK(calls == 1000);
    for (std::size_t i = 0; i < seen.size(); ++i)
        CHECK(seen[i] == static_cast<int>(i));
    CHECK_THROWS_AS(parallel_for(50,
                                 [](std::size_t i) {
                                     if (i == 17)
                                         throw std::domain_error("boom");
                                 }),
                    std::domain_error);
    parallel_for(0, [](std::size_t) { FAIL("called for empty range"); });
    setenv("TWOSCALE_WORKERS", "nonsense", 1);
    CHECK(worker_count() >= 1u);
    unsetenv("TWOSCALE_WORKERS");
}

TEST_CASE("transmission sweeps")
{
    const std::vector<double> ks{0.5, 1.0, 2.0};
    const std::vector<double> eps{0.1, 0.05, 0.025, 0.0125};
    const auto phi = library::well();
    const auto psi = library::boxdelta();

    SUBCASE("values are the worst momentum")
    {
        const auto rep = transmission_sweep(phi, psi, 0.0, 1.0, Regime::slow_delta(), ks, eps);
        CHECK_NOTHROW(rep.validate());
        CHECK(rep.metric_name == "transmission_gap");
        CHECK(rep.reference_rate == 0.5);
        const auto lim = limit_operator(phi, psi, 0.0, 1.0, Regime::slow_delta());
        for (std::size_t i = 0; i < eps.size(); ++i) {
            double worst = 0.0;
            for (double k : ks)
                worst = std::max(worst,
                                 std::abs(scattering_full(phi, psi, 0.0, 1.0, eps[i],
                                                          std::sqrt(eps[i]), k).t_amp -
                                          scattering_point(lim, k).t_amp));
            CHECK(rep.values[i] == Approx(worst).epsilon(1e-14));
        }
    }
    SUBCASE("comparable regime decreases")
    {
        const auto rep =
            transmission_sweep(phi, psi, kAlpha1, 1.0, Regime::comparable(1.0), ks, eps);
        CHECK(std::isnan(rep.reference_rate));
        for (std::size_t i = 1; i < eps.size(); ++i)
            CHECK(rep.values[i] < rep.values[i - 1]);
        CHECK(rep.fitted_rate > 0.5);
    }
    SUBCASE("non-resonant opacity")
    {
        for (auto r : {Regime::slow_delta(), Regime::fast_delta()}) {
            const auto rep = transmission_sweep(phi, psi, -1.7, 1.0, r, ks, eps);
            for (std::size_t i = 1; i < eps.size(); ++i)
                CHECK(rep.values[i] < rep.values[i - 1]);
        }
    }
    SUBCASE("custom path rule")
    {
        const auto rep = transmission_sweep(phi, psi, 0.0, 1.0, Regime::slow_delta(), ks, eps,
                                            [](double e) { return 2.0 * std::sqrt(e); });
        CHECK(rep.path[0].nu == Approx(2.0 * std::sqrt(0.1)));
    }
    SUBCASE("argument checks")
    {
        const std::vector<double> none;
        const std::vector<double> up{0.01, 0.1};
        CHECK_THROWS_AS(transmission_sweep(phi, psi, 0, 1, Regime::slow_delta(), none, eps),
                        std::invalid_argument);
        CHECK_THROWS_AS(transmission_sweep(phi, psi, 0, 1, Regime::slow_delta(), ks, up),
                        std::invalid_argument);
    }
}

TEST_CASE("corrector profile")
{
    const auto hbs = half_bound_state(library::well(), kAlpha1);
    const auto psi = library::boxdelta();
    SUBCASE("closed form for the well")
    {
        for (double eta : {2.0, 8.0, 40.0}) {
            const std::vector<double> ts{0.0, 1.0 / eta, 0.6, 1.0};
            const auto prof = h_profile(psi, hbs, eta, ts);
            CHECK(prof[0].first == 0.0);
            CHECK(prof[0].second == 0.0);
            for (std::size_t i = 1; i < ts.size(); ++i) {
                CHECK(prof[i].second == Approx(well_dh(ts[i], eta)).epsilon(1e-9));
                CHECK(prof[i].first == Approx(well_h(ts[i], eta)).epsilon(1e-9));
            }
            CHECK(h_profile_defect(psi, hbs, eta) ==
                  Approx((1.0 - 2.0 / std::numbers::pi) / eta).epsilon(1e-8));
        }
    }
    SUBCASE("quadratic near the origin")
    {
        const auto p = testing::random_potential(3, 3.0);
        const double bound = 0.5 * p.sup_norm() * hbs.sup_norm();
        std::vector<double> ts;
        for (int i = 0; i < 40; ++i)
            ts.push_back(testing::uniform(-1.0, 1.0));
        const auto prof = h_profile(p, hbs, 10.0, ts);
        for (std::size_t i = 0; i < ts.size(); ++i)
            CHECK(std::abs(prof[i].first) <= bound * ts[i] * ts[i] * (1 + 1e-9) + 1e-14);
    }
    SUBCASE("defect halves as eta doubles")
    {
        const PiecewisePotential skew({-1.0, 0.0, 1.0}, {Poly3{0.3, 1, 0, 0}, Poly3{2, 0, -1, 0}});
        double prev = h_profile_defect(skew, hbs, 20.0);
        for (double eta : {40.0, 80.0, 160.0}) {
            const double d = h_profile_defect(skew, hbs, eta);
            CHECK(d / prev == Approx(0.5).epsilon(2e-2));
            prev = d;
        }
        // second resonance of the well, theta = +1
        const auto second = half_bound_state(library::well(), -std::numbers::pi * std::numbers::pi);
        CHECK(second.theta == Approx(1.0).epsilon(1e-10));
        const double d1 = h_profile_defect(skew, second, 50.0);
        const double d2 = h_profile_defect(skew, second, 100.0);
        CHECK(d2 / d1 == Approx(0.5).epsilon(2e-2));
    }
    SUBCASE("defect contracts on random data")
    {
        // the leading 1/eta term is proportional to Psi near 0, so draw Psi smooth
        // and away from zero on |t| < 1/10
        for (int trial = 0; trial < 20; ++trial) {
            PiecewisePotential p;
            for (;;) {
                p = testing::random_potential(3, 3.0);
                bool ok = std::abs(p(-1e-12)) >= 0.5 && std::abs(p(1e-12)) >= 0.5;
                for (double b : p.breakpoints())
                    ok = ok && std::abs(b) >= 0.1;
                if (ok)
                    break;
            }
            double prev = h_profile_defect(p, hbs, 10.0);
            for (double eta : {20.0, 40.0, 80.0}) {
                const double d = h_profile_defect(p, hbs, eta);
                CHECK(d <= 0.7 * prev + 1e-10);
                prev = d;
            }
        }
    }
    CHECK_THROWS_AS(h_profile_defect(psi, hbs, 0.0), std::invalid_argument);
}

TEST_CASE("meshes")
{
    SUBCASE("uniform")
    {
        const auto m = Mesh::uniform(2.0, 0.25);
        CHECK(m.size() == 17);
        CHECK(m.nodes[m.centre] == 0.0);
        CHECK(m.nodes.front() == -2.0);
        CHECK(m.space_dim() == 16);
        CHECK_THROWS_AS(Mesh::uniform(1.0, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(Mesh::uniform(1.0, 5.0), std::invalid_argument);
    }
    SUBCASE("graded")
    {
        for (int trial = 0; trial < 30; ++trial) {
            const double nu = testing::uniform(0.01, 0.3);
            const double eps = nu * testing::uniform(0.01, 1.0);
            const double core = nu / 8.0;
            std::vector<double> anchors{-nu, -eps, eps, nu, 0.5 * nu, 3.0};
            const auto m = Mesh::graded(12.0, eps, nu, core, 1.0 / 32, 0.1, anchors);
            CHECK(m.nodes.front() == -12.0);
            CHECK(m.nodes.back() == 12.0);
            CHECK(m.nodes[m.centre] == 0.0);
            for (double a : anchors)
                CHECK(std::find(m.nodes.begin(), m.nodes.end(), a) != m.nodes.end());
            double worst_core = 0.0, worst_phi = 0.0, worst_bulk = 0.0;
            for (std::size_t i = 0; i + 1 < m.size(); ++i) {
                const double dx = m.nodes[i + 1] - m.nodes[i];
                CHECK(dx > 0.0);
                const double far = std::min(std::abs(m.nodes[i]), std::abs(m.nodes[i + 1]));
                if (far < eps)
                    worst_phi = std::max(worst_phi, dx);
                if (far < nu)
                    worst_core = std::max(worst_core, dx);
                worst_bulk = std::max(worst_bulk, dx);
            }
            // snapping onto an anchor may stretch a step by a quarter
            CHECK(worst_phi <= 1.25 * std::min(core, eps / 8.0) * (1 + 1e-9));
            CHECK(worst_core <= 1.25 * core * (1 + 1e-9));
            CHECK(worst_bulk <= 1.25 / 32 * (1 + 1e-9));

            const auto mass = m.masses();
            REQUIRE(mass.size() == m.space_dim());
            double total = 0.0;
            for (double w : mass) {
                CHECK(w > 0.0);
                total += w;
            }
            const double ends = 0.5 * (m.nodes[1] - m.nodes[0]) +
                                0.5 * (m.nodes.back() - m.nodes[m.size() - 2]);
            CHECK(total == Approx(24.0 - ends).epsilon(1e-12));
        }
    }
}

TEST_CASE("discrete point resolvent matches the continuous one")
{
    const double h = 0.01;
    const auto mesh = Mesh::uniform(20.0, h);
    std::vector<double> grid = mesh.nodes;
    std::vector<cplx> fg(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        fg[i] = std::exp(-std::pow(grid[i] - 0.8, 2)) * cplx(1.0, -0.5);
    const std::size_t c = mesh.centre;
    // the discrete space splits the origin in two
    std::vector<cplx> f(mesh.space_dim());
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = fg[i < c ? i + 1 : i];

    for (const auto& pi : {PointInteraction::connected(1.0, 0.0),
                           PointInteraction::connected(-1.0, 0.5),
                           PointInteraction::connected(2.0, -0.7),
                           PointInteraction::dirichlet_decoupled()}) {
        const cplx z(0.3, 2.0);
        const auto exact = resolvent_point(pi, z, grid, fg);
        const auto y = DiscreteResolvent::point(mesh, pi, z).apply(f);
        double scale = 0.0, worst = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const std::size_t node = i < c ? i + 1 : i;
            cplx want = exact.values[node];
            if (i == c - 1)
                want = exact.y_minus;
            if (i == c)
                want = exact.y_plus;
            scale = std::max(scale, std::abs(want));
            worst = std::max(worst, std::abs(y[i] - want));
        }
        CHECK(worst <= 1e-3 * scale);
    }
}

TEST_CASE("full discrete resolvent without potential is the free one")
{
    const std::vector<double> anchors{-0.3, 0.2};
    const auto mesh = Mesh::graded(10.0, 0.01, 0.1, 0.0125, 1.0 / 32, 0.1, anchors);
    std::vector<cplx> f(mesh.space_dim());
    for (auto& v : f)
        v = cplx(testing::uniform(-1, 1), testing::uniform(-1, 1));
    const cplx z(-0.5, 1.5);
    const auto a = DiscreteResolvent::full(mesh, PiecewisePotential{}, z).apply(f);
    const auto b = DiscreteResolvent::point(mesh, PointInteraction::connected(1.0, 0.0), z).apply(f);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(std::abs(a[i] - b[i]) < 1e-12 * (1.0 + std::abs(b[i])));
    CHECK(a[mesh.centre - 1] == a[mesh.centre]);
    CHECK_THROWS_AS(DiscreteResolvent::full(mesh, PiecewisePotential{}, z).apply(
                        std::vector<cplx>(3)),
                    std::invalid_argument);
}

TEST_CASE("resolvent gap")
{
    const auto phi = library::well();
    const auto psi = library::boxdelta();
    const auto slow = Regime::slow_delta();
    GapOptions o;
    o.L = 12.0;
    o.n_iter = 60;

    SUBCASE("no perturbation, no gap")
    {
        const auto g = resolvent_gap(phi, psi, 0.0, 0.0, 0.01, 0.1, slow, 2i, o);
        CHECK(g.value == 0.0);
    }
    SUBCASE("symmetric under conjugation")
    {
        const auto a = resolvent_gap(phi, psi, kAlpha1, 1.0, 0.01, 0.1, slow, cplx(0.5, 2.0), o);
        const auto b = resolvent_gap(phi, psi, kAlpha1, 1.0, 0.01, 0.1, slow, cplx(0.5, -2.0), o);
        CHECK(a.value > 0.0);
        CHECK(a.value == Approx(b.value).epsilon(1e-4));
    }
    SUBCASE("mesh refinement changes little")
    {
        auto coarse_o = o;
        coarse_o.h = 0.1 / 16.0;
        const auto coarse = resolvent_gap(phi, psi, 0.0, 1.0, 0.01, 0.1, slow, 2i, coarse_o);
        auto fine_o = o;
        fine_o.h = 0.1 / 32.0;
        const auto fine = resolvent_gap(phi, psi, 0.0, 1.0, 0.01, 0.1, slow, 2i, fine_o);
        CHECK(std::abs(coarse.value - fine.value) <= 0.3 * fine.value);
        CHECK(fine.mesh_nodes > coarse.mesh_nodes);
    }
    SUBCASE("warns when the potential is under-resolved")
    {
        auto rough = o;
        rough.h = 0.05;
        const auto g = resolvent_gap(phi, psi, 0.0, 1.0, 0.01, 0.1, slow, 2i, rough);
        REQUIRE_FALSE(g.warnings.empty());
        CHECK(g.warnings.front().find("nu/8") != std::string::npos);
        CHECK(resolvent_gap(phi, psi, 0.0, 1.0, 0.01, 0.1, slow, 2i, o).warnings.empty());
    }
    SUBCASE("argument checks")
    {
        CHECK_THROWS_AS(resolvent_gap(phi, psi, 0, 1, 0.01, 0.1, slow, 2.0, o),
                        std::invalid_argument);
        auto bad = o;
        bad.L = 5.0;
        CHECK_THROWS_AS(resolvent_gap(phi, psi, 0, 1, 0.01, 0.1, slow, 2i, bad),
                        std::invalid_argument);
        bad = o;
        bad.n_iter = 5;
        CHECK_THROWS_AS(resolvent_gap(phi, psi, 0, 1, 0.01, 0.1, slow, 2i, bad),
                        std::invalid_argument);
        CHECK_THROWS_AS(resolvent_gap(phi, psi, 0, 1, 0.0, 0.1, slow, 2i, o),
                        std::invalid_argument);
    }
    SUBCASE("sweep keeps path order")
    {
        const double nus[] = {0.2, 0.1};
        const auto rep = gap_sweep(phi, psi, 0.0, 1.0, slow, path_from_nu(slow, nus), "nu", 2i, o);
        CHECK_NOTHROW(rep.validate());
        CHECK(rep.metric_name == "resolvent_gap");
        const auto single = resolvent_gap(phi, psi, 0.0, 1.0, 0.01, 0.1, slow, 2i,
                                          [&] { auto x = o; x.h = 0.1 / 8; return x; }());
        CHECK(rep.values[1] == Approx(single.value).epsilon(1e-12));
        CHECK(rep.values[1] < rep.values[0]);
        CHECK(std::isnan(rep.fitted_rate));
        CHECK_THROWS_AS(gap_sweep(phi, psi, 0, 1, slow, {}, "nu", 2i, o), std::invalid_argument);
    }
}
