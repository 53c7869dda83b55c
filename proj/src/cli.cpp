#include "twoscale/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <locale>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "twoscale/io.hpp"
#include "twoscale/limits.hpp"
#include "twoscale/pointmodel.hpp"
#include "twoscale/resonance.hpp"
#include "twoscale/scatter.hpp"

namespace twoscale::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    std::string phi = "well";
    std::string psi = "boxdelta";
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> eps;
    std::vector<double> nu;
    double lambda = 0.0;
    std::vector<double> k;
    double z_real = 0.0;
    double z_imag = 2.0;
    double L = 20.0;
    double h = 0.0;
    int iter = 200;
    std::string regime;
    double amin = -25.0;
    double amax = 1.0;
    int scan = 2000;
    int points = 256;
    double tol = kDefaultResonanceTol;
    std::string out;
    std::string format = "csv";
};

void require_finite(double v, const char* name)
{
    if (!std::isfinite(v))
        throw UsageError(std::string("--") + name + " must be finite");
}

void require_finite(const std::vector<double>& v, const char* name)
{
    for (double x : v)
        require_finite(x, name);
}

PiecewisePotential potential_arg(const std::string& name)
{
    try {
        return load_potential(name);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

Regime regime_arg(const Config& c)
{
    if (c.regime.empty())
        throw UsageError("--regime is required (slow, comparable or fast)");
    if (c.regime == "comparable" && !(c.lambda > 0.0))
        throw UsageError("--regime comparable needs --lambda > 0");
    try {
        return parse_regime(c.regime, c.lambda);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

std::ostringstream number_stream()
{
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17);
    return os;
}

void emit(const Config& c, std::ostream& out, const std::string& text)
{
    if (c.out.empty()) {
        out << text;
        return;
    }
    std::ofstream file(c.out);
    if (!file)
        throw std::runtime_error("cannot write '" + c.out + "'");
    file << text;
}

void emit_report(const Config& c, std::ostream& out, const ConvergenceReport& r)
{
    if (c.format == "json") {
        emit(c, out, report_to_json(r) + "\n");
    } else {
        std::ostringstream os;
        write_csv(os, r);
        emit(c, out, os.str());
    }
}

json cplx_json(cplx z)
{
    return json::array({z.real(), z.imag()});
}

// ---------------------------------------------------------------------------

void cmd_resonances(const Config& c, std::ostream& out, std::ostream& err)
{
    if (!(c.amin < c.amax))
        throw UsageError("--min must be below --max");
    if (c.scan < 2)
        throw UsageError("--scan must be at least 2");
    const auto phi = potential_arg(c.phi);
    const auto scan = find_resonances(phi, c.amin, c.amax, c.scan);
    for (const auto& [lo, hi] : scan.suspect_cells)
        err << "warning: roots may hide in [" << lo << ", " << hi
            << "]; increase --scan\n";

    std::vector<HalfBoundState> states;
    for (double a : scan.alphas)
        states.push_back(half_bound_state(phi, a, c.tol));
    if (c.format == "json") {
        json rows = json::array();
        for (const auto& h : states)
            rows.push_back({{"alpha", h.alpha}, {"theta", h.theta}, {"u_at_zero", h.u_at_zero}});
        emit(c, out, json{{"resonances", rows}}.dump(2) + "\n");
        return;
    }
    auto os = number_stream();
    os << "alpha,theta,u_at_zero\n";
    for (const auto& h : states)
        os << h.alpha << ',' << h.theta << ',' << h.u_at_zero << '\n';
    emit(c, out, os.str());
}

void cmd_hbs(const Config& c, std::ostream& out)
{
    if (c.points < 2)
        throw UsageError("--points must be at least 2");
    const auto phi = potential_arg(c.phi);
    const auto h = half_bound_state(phi, c.alpha, c.tol);
    std::vector<double> ts(c.points);
    for (int i = 0; i < c.points; ++i)
        ts[i] = -1.0 + 2.0 * i / (c.points - 1);
    if (c.format == "json") {
        json trace = json::array();
        for (double t : ts)
            trace.push_back({t, h.value(t), h.derivative(t)});
        const json j{{"alpha", h.alpha},         {"theta", h.theta},
                     {"u_at_zero", h.u_at_zero}, {"residual", h.residual},
                     {"trace", trace}};
        emit(c, out, j.dump(2) + "\n");
        return;
    }
    auto os = number_stream();
    os << "t,u,du\n";
    for (double t : ts)
        os << t << ',' << h.value(t) << ',' << h.derivative(t) << '\n';
    emit(c, out, os.str());
}

void cmd_limit(const Config& c, std::ostream& out)
{
    const auto regime = regime_arg(c);
    const auto phi = potential_arg(c.phi);
    const auto psi = potential_arg(c.psi);
    const auto pi = limit_operator(phi, psi, c.alpha, c.beta, regime, c.tol);
    const std::string kind = pi.is_connected() ? "connected" : "dirichlet_decoupled";
    if (c.format == "json") {
        json j{{"kind", kind}, {"regime", to_string(regime)}};
        if (pi.is_connected()) {
            j["gamma1"] = pi.gamma1();
            j["gamma2"] = pi.gamma2();
        }
        emit(c, out, j.dump(2) + "\n");
        return;
    }
    auto os = number_stream();
    os << "kind,gamma1,gamma2\n" << kind << ',';
    if (pi.is_connected())
        os << pi.gamma1() << ',' << pi.gamma2();
    else
        os << ',';
    os << '\n';
    emit(c, out, os.str());
}

void cmd_scatter(const Config& c, std::ostream& out)
{
    if (c.eps.size() != 1 || c.nu.size() != 1)
        throw UsageError("scatter needs exactly one --eps and one --nu");
    if (c.k.empty())
        throw UsageError("--k is required");
    const double eps = c.eps[0], nu = c.nu[0];
    if (!(eps > 0.0) || !(nu > 0.0))
        throw UsageError("--eps and --nu must be positive");
    for (double k : c.k)
        if (!(k > 0.0))
            throw UsageError("--k must be positive");
    const auto phi = potential_arg(c.phi);
    const auto psi = potential_arg(c.psi);
    std::vector<ScatteringData> rows;
    for (double k : c.k)
        rows.push_back(scattering_full(phi, psi, c.alpha, c.beta, eps, nu, k));
    if (c.format == "json") {
        json arr = json::array();
        for (const auto& s : rows)
            arr.push_back({{"k", s.k},
                           {"t", cplx_json(s.t_amp)},
                           {"abs_t", std::abs(s.t_amp)},
                           {"r_left", cplx_json(s.r_left)},
                           {"r_right", cplx_json(s.r_right)},
                           {"unitarity_defect", s.unitarity_defect}});
        emit(c, out, json{{"eps", eps}, {"nu", nu}, {"scattering", arr}}.dump(2) + "\n");
        return;
    }
    auto os = number_stream();
    os << "k,t_re,t_im,abs_t,r_re,r_im,unitarity_defect\n";
    for (const auto& s : rows)
        os << s.k << ',' << s.t_amp.real() << ',' << s.t_amp.imag() << ',' << std::abs(s.t_amp)
           << ',' << s.r_left.real() << ',' << s.r_left.imag() << ',' << s.unitarity_defect
           << '\n';
    emit(c, out, os.str());
}

void check_decreasing(const std::vector<double>& v, const char* name)
{
    for (double x : v)
        if (!(x > 0.0))
            throw UsageError(std::string("--") + name + " values must be positive");
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1]))
            throw UsageError(std::string("--") + name + " values must strictly decrease");
}

void cmd_sweep(const Config& c, std::ostream& out, std::ostream& err)
{
    const auto regime = regime_arg(c);
    if (c.eps.empty())
        throw UsageError("--eps list is required");
    if (c.k.empty())
        throw UsageError("--k list is required");
    check_decreasing(c.eps, "eps");
    for (double k : c.k)
        if (!(k > 0.0))
            throw UsageError("--k must be positive");
    const auto phi = potential_arg(c.phi);
    const auto psi = potential_arg(c.psi);
    const auto r = transmission_sweep(phi, psi, c.alpha, c.beta, regime, c.k, c.eps, {}, c.tol);
    for (const auto& w : r.warnings)
        err << "warning: " << w << '\n';
    emit_report(c, out, r);
}

void cmd_gap(const Config& c, std::ostream& out, std::ostream& err)
{
    const auto regime = regime_arg(c);
    if (c.eps.empty() == c.nu.empty())
        throw UsageError("gap needs either an --eps list or a --nu list");
    if (c.z_imag == 0.0)
        throw UsageError("--z-imag must be nonzero");
    if (!(c.L >= 10.0))
        throw UsageError("--L must be at least 10");
    if (c.iter < 20)
        throw UsageError("--iter must be at least 20");
    if (c.h < 0.0)
        throw UsageError("--h must be nonnegative");
    const auto phi = potential_arg(c.phi);
    const auto psi = potential_arg(c.psi);
    std::vector<PathPoint> path;
    std::string parameter;
    if (!c.eps.empty()) {
        check_decreasing(c.eps, "eps");
        path = path_from_eps(c.eps, default_path_rule(regime));
        parameter = "eps";
    } else {
        check_decreasing(c.nu, "nu");
        path = path_from_nu(regime, c.nu);
        parameter = "nu";
    }
    GapOptions o;
    o.L = c.L;
    o.h = c.h;
    o.n_iter = c.iter;
    const auto r =
        gap_sweep(phi, psi, c.alpha, c.beta, regime, path, parameter, {c.z_real, c.z_imag}, o);
    for (const auto& w : r.warnings)
        err << "warning: " << w << '\n';
    emit_report(c, out, r);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Config c;
    CLI::App app{"Two-scale point-interaction toolkit"};
    app.name(args.empty() ? "twoscale" : args[0]);
    app.footer("Environment:\n  TWOSCALE_WORKERS  number of worker threads for sweep and gap "
               "(default: hardware concurrency)\n"
               "Potentials: a file with 'breakpoints = [...]' and 'pieces = [[c0,c1,c2,c3], "
               "...]', or one of the built-ins well, dip, boxdelta.");
    app.require_subcommand(1);

    auto add_phi = [&](CLI::App* s) {
        s->add_option("--phi", c.phi, "Phi potential file or built-in name")->capture_default_str();
    };
    auto add_psi = [&](CLI::App* s) {
        s->add_option("--psi", c.psi, "Psi potential file or built-in name")->capture_default_str();
    };
    auto add_ab = [&](CLI::App* s) {
        s->add_option("--alpha", c.alpha, "coupling of Phi")->capture_default_str();
        s->add_option("--beta", c.beta, "coupling of Psi")->capture_default_str();
    };
    auto add_regime = [&](CLI::App* s) {
        s->add_option("--regime", c.regime, "slow, comparable or fast")
            ->check(CLI::IsMember({"slow", "comparable", "fast"}));
        s->add_option("--lambda", c.lambda, "limit of nu/eps for the comparable regime");
    };
    auto add_tol = [&](CLI::App* s) {
        s->add_option("--tol", c.tol, "relative resonance tolerance")->capture_default_str();
    };
    auto add_output = [&](CLI::App* s) {
        s->add_option("--out", c.out, "output file (stdout when omitted)");
        s->add_option("--format", c.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
    };

    auto* res = app.add_subcommand("resonances", "resonant couplings of Phi in [min, max]");
    add_phi(res);
    res->add_option("--min", c.amin, "lower end of the coupling range")->capture_default_str();
    res->add_option("--max", c.amax, "upper end of the coupling range")->capture_default_str();
    res->add_option("--scan", c.scan, "scan grid points")->capture_default_str();
    add_tol(res);
    add_output(res);

    auto* hbs = app.add_subcommand("hbs", "half-bound state of alpha Phi on [-1, 1]");
    add_phi(hbs);
    hbs->add_option("--alpha", c.alpha, "resonant coupling")->required();
    hbs->add_option("--points", c.points, "trace samples")->capture_default_str();
    add_tol(hbs);
    add_output(hbs);

    auto* lim = app.add_subcommand("limit", "limit point interaction");
    add_phi(lim);
    add_psi(lim);
    add_ab(lim);
    add_regime(lim);
    add_tol(lim);
    add_output(lim);

    auto* sc = app.add_subcommand("scatter", "scattering amplitudes of the full operator");
    add_phi(sc);
    add_psi(sc);
    add_ab(sc);
    sc->add_option("--eps", c.eps, "scale of Phi")->required();
    sc->add_option("--nu", c.nu, "scale of Psi")->required();
    sc->add_option("--k", c.k, "momenta (comma separated)")->delimiter(',')->required();
    add_output(sc);

    auto* sw = app.add_subcommand("sweep", "transmission gap along a limit path");
    add_phi(sw);
    add_psi(sw);
    add_ab(sw);
    add_regime(sw);
    sw->add_option("--eps", c.eps, "decreasing eps path (comma separated)")->delimiter(',');
    sw->add_option("--k", c.k, "momenta (comma separated)")->delimiter(',');
    add_tol(sw);
    add_output(sw);

    auto* gap = app.add_subcommand("gap", "discretized resolvent gap along a limit path");
    gap->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
    add_phi(gap);
    add_psi(gap);
    add_ab(gap);
    add_regime(gap);
    gap->add_option("--eps", c.eps, "decreasing eps path (comma separated)")->delimiter(',');
    gap->add_option("--nu", c.nu, "decreasing nu path (comma separated)")->delimiter(',');
    gap->add_option("--z-real", c.z_real, "real part of z")->capture_default_str();
    gap->add_option("--z-imag", c.z_imag, "imaginary part of z")->capture_default_str();
    gap->add_option("--L", c.L, "half-width of the truncated domain")->capture_default_str();
    gap->add_option("--h", c.h, "step on the nu scale (0 selects nu/8)")->capture_default_str();
    gap->add_option("--iter", c.iter, "power-iteration cap")->capture_default_str();
    add_output(gap);

    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    if (argv.empty())
        argv.push_back("twoscale");
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        if (const auto nl = msg.find('\n'); nl != std::string::npos)
            msg.erase(nl);
        err << "usage error: " << msg << '\n';
        return 2;
    }

    try {
        for (double v : {c.alpha, c.beta, c.lambda, c.z_real, c.z_imag, c.L, c.h, c.amin, c.amax,
                         c.tol})
            if (!std::isfinite(v))
                throw UsageError("numeric flags must be finite");
        require_finite(c.eps, "eps");
        require_finite(c.nu, "nu");
        require_finite(c.k, "k");
        if (!(c.tol > 0.0))
            throw UsageError("--tol must be positive");

        if (res->parsed())
            cmd_resonances(c, out, err);
        else if (hbs->parsed())
            cmd_hbs(c, out);
        else if (lim->parsed())
            cmd_limit(c, out);
        else if (sc->parsed())
            cmd_scatter(c, out);
        else if (sw->parsed())
            cmd_sweep(c, out, err);
        else if (gap->parsed())
            cmd_gap(c, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace twoscale::cli
