#include "weylprior/errors.hpp"
#include "weylprior/priors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>

namespace weylprior {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_cell(const std::string& cell, const std::string& source, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size())
    throw ParseError(source + ":" + std::to_string(line) + ": '" + cell + "' is not a number");
  return v;
}

}  // namespace

void write_prior_csv(const PriorField& field, std::ostream& out) {
  for (const auto& c : field.support.coordinates) out << c << ',';
  out << "value\n";
  for (std::size_t i = 0; i < field.size(); ++i) {
    const Vec& p = field.support.points[i];
    for (Eigen::Index k = 0; k < p.size(); ++k) out << format_double(p[k]) << ',';
    out << format_double(field.values[i]) << '\n';
  }
}

PriorField read_prior_csv(std::istream& in, const ModelSpec& model, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source + ": empty prior file");
  auto header = split_csv(line);
  if (header.size() < 2 || header.back() != "value")
    throw ParseError(source + ":1: header must list the coordinates followed by 'value'");
  header.pop_back();

  const Chart* chart = nullptr;
  if (model.chart().coordinates == header) chart = &model.chart();
  for (const auto& c : model.charts)
    if (!chart && c.coordinates == header) chart = &c;
  if (!chart) throw ParseError(source + ":1: header columns match no chart of model " + model.id);

  PriorField field;
  field.kind = PriorKind::tabulated;
  field.support.chart = chart->name;
  field.support.coordinates = chart->coordinates;
  const std::size_t m = header.size();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != m + 1)
      throw ParseError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(m + 1) + " columns");
    Vec p(static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) p[static_cast<Eigen::Index>(k)] = parse_cell(cells[k], source, line_no);
    const double v = parse_cell(cells[m], source, line_no);
    if (!(v > 0.0) || !std::isfinite(v))
      throw ParseError(source + ":" + std::to_string(line_no) + ": prior value must be positive and finite");
    if (!chart->contains(p))
      throw ParseError(source + ":" + std::to_string(line_no) + ": point outside chart " + chart->name);
    field.support.points.push_back(p);
    field.values.push_back(v);
  }
  if (field.values.empty()) throw ParseError(source + ": prior file has no rows");

  // Cell volumes: the points must form a full rectilinear grid.
  std::vector<std::vector<double>> nodes(m);
  std::vector<std::map<double, double>> weight(m);
  std::size_t combos = 1;
  for (std::size_t k = 0; k < m; ++k) {
    std::set<double> uniq;
    for (const auto& p : field.support.points) uniq.insert(p[static_cast<Eigen::Index>(k)]);
    nodes[k].assign(uniq.begin(), uniq.end());
    const auto w = trapezoid_weights(nodes[k]);
    for (std::size_t i = 0; i < w.size(); ++i) weight[k][nodes[k][i]] = w[i];
    combos *= nodes[k].size();
  }
  std::set<std::vector<double>> seen;
  for (const auto& p : field.support.points) seen.insert(to_std(p));
  if (combos != field.values.size() || seen.size() != field.values.size())
    throw ParseError(source + ": prior points do not form a rectilinear grid");
  for (const auto& p : field.support.points) {
    double vol = 1.0;
    for (std::size_t k = 0; k < m; ++k) vol *= weight[k][p[static_cast<Eigen::Index>(k)]];
    field.support.cell_volumes.push_back(vol);
  }
  return field;
}

}  // namespace weylprior
