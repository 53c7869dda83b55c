#include "twoscale/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <locale>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace twoscale {

using nlohmann::json;

namespace {

std::string strip(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

int bracket_balance(const std::string& s)
{
    int depth = 0;
    for (char c : s) {
        if (c == '[')
            ++depth;
        else if (c == ']')
            --depth;
    }
    return depth;
}

json number_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

double number_or_nan(const json& j)
{
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

PiecewisePotential parse_potential(std::istream& in)
{
    std::map<std::string, std::string> entries;
    std::string line, key, value;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = strip(line);
        if (line.empty())
            continue;
        if (key.empty()) {
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("potential file line " + std::to_string(lineno) +
                                            ": expected key = value");
            key = strip(line.substr(0, eq));
            value = strip(line.substr(eq + 1));
        } else {
            value += " " + line;
        }
        if (bracket_balance(value) == 0) {
            if (entries.count(key))
                throw std::invalid_argument("potential file: duplicate key '" + key + "'");
            entries[key] = value;
            key.clear();
        }
    }
    if (!key.empty())
        throw std::invalid_argument("potential file: unterminated array for '" + key + "'");
    for (const auto& [k, v] : entries)
        if (k != "breakpoints" && k != "pieces")
            throw std::invalid_argument("potential file: unknown key '" + k + "'");
    if (!entries.count("breakpoints") || !entries.count("pieces"))
        throw std::invalid_argument("potential file: needs breakpoints and pieces");

    std::vector<double> breakpoints;
    std::vector<Poly3> pieces;
    try {
        breakpoints = json::parse(entries["breakpoints"]).get<std::vector<double>>();
        for (const auto& row : json::parse(entries["pieces"])) {
            const auto c = row.is_number() ? std::vector<double>{row.get<double>()}
                                           : row.get<std::vector<double>>();
            if (c.empty() || c.size() > 4)
                throw std::invalid_argument("potential file: a piece needs 1 to 4 coefficients");
            Poly3 p{};
            std::copy(c.begin(), c.end(), p.begin());
            pieces.push_back(p);
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("potential file: ") + e.what());
    }
    return PiecewisePotential(std::move(breakpoints), std::move(pieces));
}

PiecewisePotential parse_potential_text(const std::string& text)
{
    std::istringstream in(text);
    return parse_potential(in);
}

std::string format_potential(const PiecewisePotential& p)
{
    json pieces = json::array();
    for (const auto& c : p.pieces())
        pieces.push_back(std::vector<double>(c.begin(), c.end()));
    return "breakpoints = " + json(p.breakpoints()).dump() + "\npieces = " + pieces.dump() + "\n";
}

PiecewisePotential load_potential(const std::string& name_or_path)
{
    if (name_or_path == "well")
        return library::well();
    if (name_or_path == "dip")
        return library::dip();
    if (name_or_path == "boxdelta")
        return library::boxdelta();
    std::ifstream in(name_or_path);
    if (!in)
        throw std::invalid_argument("cannot open potential '" + name_or_path + "'");
    return parse_potential(in);
}

void write_csv(std::ostream& out, const ConvergenceReport& report)
{
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17);
    os << "eps,nu,eta,metric,value\n";
    for (std::size_t i = 0; i < report.path.size(); ++i) {
        const auto& p = report.path[i];
        os << p.eps << ',' << p.nu << ',' << p.eta() << ',' << report.metric_name << ','
           << report.values.at(i) << '\n';
    }
    out << os.str();
}

std::string report_to_json(const ConvergenceReport& report, int indent)
{
    json j;
    j["regime"] = to_string(report.regime);
    j["parameter"] = report.parameter;
    j["metric"] = report.metric_name;
    json path = json::array();
    for (const auto& p : report.path)
        path.push_back({{"eps", p.eps}, {"nu", p.nu}, {"eta", p.eta()}});
    j["path"] = path;
    j["values"] = report.values;
    j["fitted_rate"] = number_or_null(report.fitted_rate);
    j["reference_rate"] = number_or_null(report.reference_rate);
    j["warnings"] = report.warnings;
    return j.dump(indent);
}

ConvergenceReport report_from_json(const std::string& text)
{
    ConvergenceReport r;
    try {
        const json j = json::parse(text);
        r.regime = parse_regime(j.at("regime").get<std::string>());
        r.parameter = j.at("parameter").get<std::string>();
        r.metric_name = j.at("metric").get<std::string>();
        for (const auto& p : j.at("path"))
            r.path.push_back({p.at("eps").get<double>(), p.at("nu").get<double>()});
        r.values = j.at("values").get<std::vector<double>>();
        r.fitted_rate = number_or_nan(j.at("fitted_rate"));
        r.reference_rate = number_or_nan(j.at("reference_rate"));
        r.warnings = j.value("warnings", std::vector<std::string>{});
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("report json: ") + e.what());
    }
    r.validate();
    return r;
}

}  // namespace twoscale
