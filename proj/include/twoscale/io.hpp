#pragma once

#include <iosfwd>
#include <string>

#include "twoscale/limits.hpp"
#include "twoscale/potential.hpp"

namespace twoscale {

/// Reads the key-value potential format:
///   breakpoints = [-1, 0, 1]
///   pieces = [[1], [-1, 0, 0, 0]]
/// Short coefficient lists are padded with zeros; '#' starts a comment and an
/// array may span several lines.
PiecewisePotential parse_potential(std::istream& in);
PiecewisePotential parse_potential_text(const std::string& text);
std::string format_potential(const PiecewisePotential& p);

/// Built-in name (well, dip, boxdelta) or a path to a potential file.
PiecewisePotential load_potential(const std::string& name_or_path);

/// Columns eps, nu, eta, metric, value; 17 significant digits.
void write_csv(std::ostream& out, const ConvergenceReport& report);
std::string report_to_json(const ConvergenceReport& report, int indent = 2);
/// Parses and validates; throws std::invalid_argument on bad content.
ConvergenceReport report_from_json(const std::string& text);

}  // namespace twoscale
