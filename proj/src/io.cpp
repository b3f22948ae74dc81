#include "reflectcost/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace reflectcost {

namespace {

using nlohmann::json;

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
  return out;
}

double parse_number(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw schema_error("not a number: '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw schema_error("not a number: '" + s + "'");
  }
}

// Non-empty, non-comment lines.
std::vector<std::string> data_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw schema_error("cannot open " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    out.push_back(line);
  }
  return out;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw schema_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw schema_error(path + ": " + e.what());
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw schema_error("cannot write " + path);
  return out;
}

// File weights carry decimal rounding; accept 1e-9 and renormalize.
DiscreteMeasure normalized_measure(Eigen::VectorXd w) {
  if (w.size() == 0) throw schema_error("measure: no weights");
  if (!w.allFinite() || w.minCoeff() < 0.0) throw schema_error("measure: negative or non-finite weight");
  const double s = w.sum();
  if (std::abs(s - 1.0) > 1e-9) throw schema_error("measure: weights sum to " + format_double(s));
  return DiscreteMeasure(w / s);
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() == 1) return {parse_number(parts[0])};
  if (parts.size() != 3) throw schema_error("grid must be start:stop:step");
  const double a = parse_number(parts[0]), b = parse_number(parts[1]), h = parse_number(parts[2]);
  if (!(h > 0.0) || b < a) throw schema_error("grid needs step > 0 and stop >= start");
  std::vector<double> out;
  for (long k = 0;; ++k) {
    const double v = a + static_cast<double>(k) * h;
    if (v > b + 1e-9 * h) break;
    out.push_back(v);
    if (k > 10000000) throw schema_error("grid too large");
  }
  return out;
}

double parse_extended(const std::string& text) {
  const std::string s = trim(text);
  if (s == "inf" || s == "+inf" || s == "Inf" || s == "infinity") return kInf;
  if (s == "-inf") return -kInf;
  return parse_number(s);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

DiscreteMeasure read_measure(const std::string& path) {
  if (ends_with(path, ".json")) {
    const json j = read_json(path);
    if (!j.contains("weights") || !j["weights"].is_array()) throw schema_error(path + ": missing 'weights' array");
    const auto w = j["weights"].get<std::vector<double>>();
    return normalized_measure(Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())));
  }
  const auto lines = data_lines(path);
  if (lines.empty() || split(lines[0], ',') != std::vector<std::string>{"index", "weight"})
    throw schema_error(path + ": expected header 'index,weight'");
  Eigen::VectorXd w = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(lines.size() - 1), -1.0);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto cells = split(lines[k], ',');
    if (cells.size() != 2) throw schema_error(path + ": expected two columns");
    const double idx = parse_number(cells[0]);
    if (idx < 0 || idx >= static_cast<double>(w.size()) || idx != std::floor(idx) || w[static_cast<Eigen::Index>(idx)] >= 0.0)
      throw schema_error(path + ": bad or repeated index " + cells[0]);
    w[static_cast<Eigen::Index>(idx)] = parse_number(cells[1]);
  }
  return normalized_measure(std::move(w));
}

void write_measure(const std::string& path, const DiscreteMeasure& mu) {
  auto out = open_out(path);
  if (ends_with(path, ".json")) {
    out << json{{"weights", std::vector<double>(mu.weights.data(), mu.weights.data() + mu.size())}}.dump() << "\n";
    return;
  }
  out << "index,weight\n";
  for (Eigen::Index i = 0; i < mu.size(); ++i) out << i << "," << format_double(mu.weights[i]) << "\n";
}

CostMatrix read_cost(const std::string& path) {
  std::vector<std::vector<double>> rows;
  bool metric = false;
  if (ends_with(path, ".json")) {
    const json j = read_json(path);
    if (!j.contains("entries") || !j["entries"].is_array()) throw schema_error(path + ": missing 'entries'");
    try {
      rows = j["entries"].get<std::vector<std::vector<double>>>();
    } catch (const json::exception& e) {
      throw schema_error(path + ": " + e.what());
    }
    metric = j.value("metric", false);
  } else {
    for (const auto& line : data_lines(path)) {
      std::vector<double> row;
      for (const auto& cell : split(line, ',')) row.push_back(parse_number(cell));
      rows.push_back(std::move(row));
    }
  }
  if (rows.empty() || rows[0].empty()) throw schema_error(path + ": empty cost matrix");
  Eigen::MatrixXd c(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw schema_error(path + ": ragged cost matrix");
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  try {
    return metric ? CostMatrix::metric(std::move(c)) : CostMatrix(std::move(c));
  } catch (const std::invalid_argument& e) {
    throw schema_error(path + ": " + e.what());
  }
}

void write_cost(const std::string& path, const CostMatrix& c) {
  auto out = open_out(path);
  if (ends_with(path, ".json")) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < c.cols(); ++j) row.push_back(c.entries(i, j));
      rows.push_back(row);
    }
    out << json{{"entries", rows}, {"metric", c.metric_flag}}.dump() << "\n";
    return;
  }
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (Eigen::Index j = 0; j < c.cols(); ++j) out << (j ? "," : "") << format_double(c.entries(i, j));
    out << "\n";
  }
}

DiscreteMeasure read_grid_measure(const std::string& path, const SphereGrid& grid) {
  const auto lines = data_lines(path);
  if (lines.empty() || split(lines[0], ',') != std::vector<std::string>{"colat_index", "lon_index", "weight"})
    throw schema_error(path + ": expected header 'colat_index,lon_index,weight'");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(grid.size());
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto cells = split(lines[k], ',');
    if (cells.size() != 3) throw schema_error(path + ": expected three columns");
    const double i = parse_number(cells[0]), j = parse_number(cells[1]);
    if (i < 0 || i >= grid.n_colat || j < 0 || j >= grid.n_lon || i != std::floor(i) || j != std::floor(j))
      throw schema_error(path + ": cell index out of range");
    w[grid.index(static_cast<int>(i), static_cast<int>(j))] += parse_number(cells[2]);
  }
  return normalized_measure(std::move(w));
}

void write_grid_measure(const std::string& path, const DiscreteMeasure& mu, const SphereGrid& grid) {
  if (mu.size() != grid.size()) throw schema_error("grid measure: size mismatch");
  auto out = open_out(path);
  out << "colat_index,lon_index,weight\n";
  for (int i = 0; i < grid.n_colat; ++i)
    for (int j = 0; j < grid.n_lon; ++j) out << i << "," << j << "," << format_double(mu.weights[grid.index(i, j)]) << "\n";
}

}  // namespace reflectcost
