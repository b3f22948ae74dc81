#pragma once

#include <string>
#include <vector>

#include "reflectcost/spaceform.hpp"
#include "reflectcost/specfun.hpp"
#include "reflectcost/transport.hpp"

namespace reflectcost {

/// Raised for malformed input files or flags.
class schema_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// "start:stop:step" (stop inclusive up to rounding) or a single number.
std::vector<double> parse_grid(const std::string& spec);

/// Real number, accepting "inf" and "-inf".
double parse_extended(const std::string& text);

/// Shortest round-trip decimal representation.
std::string format_double(double x);

/// Measure from CSV (header "index,weight") or JSON ({"weights": [...]}), chosen by extension.
DiscreteMeasure read_measure(const std::string& path);
void write_measure(const std::string& path, const DiscreteMeasure& mu);

/// Dense cost matrix from CSV (one row per line) or JSON ({"entries": [[...]], "metric": bool}).
CostMatrix read_cost(const std::string& path);
void write_cost(const std::string& path, const CostMatrix& c);

/// Grid measure CSV with header "colat_index,lon_index,weight".
DiscreteMeasure read_grid_measure(const std::string& path, const SphereGrid& grid);
void write_grid_measure(const std::string& path, const DiscreteMeasure& mu, const SphereGrid& grid);

}  // namespace reflectcost
