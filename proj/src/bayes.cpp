#include "weylprior/bayes.hpp"

#include "weylprior/errors.hpp"
#include "weylprior/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <ostream>
#include <set>

namespace weylprior {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace

Dataset parse_observations(std::istream& in, const ModelSpec& model, const std::string& source) {
  Dataset data;
  data.source = source;
  const int d = model.sample_space.dimension;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(',', start);
      const std::string cell = trim(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size())
        throw ParseError(source + ":" + std::to_string(line_no) + ": '" + cell + "' is not a number");
      if (!std::isfinite(v)) throw ParseError(source + ":" + std::to_string(line_no) + ": non-finite observation");
      row.push_back(v);
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (static_cast<int>(row.size()) != d)
      throw ParseError(source + ":" + std::to_string(line_no) + ": observation has " + std::to_string(row.size()) +
                       " columns, model " + model.id + " has sample dimension " + std::to_string(d));
    data.observations.push_back(from_std(row));
  }
  if (data.observations.empty()) throw ParseError(source + ": no observations");
  return data;
}

Dataset load_observations(const std::filesystem::path& path, const ModelSpec& model) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open observation file " + path.string());
  return parse_observations(in, model, path.string());
}

std::size_t PosteriorGrid::mode_index() const {
  return static_cast<std::size_t>(std::max_element(log_values.begin(), log_values.end()) - log_values.begin());
}

PosteriorGrid grid_posterior(const ModelSpec& base, const PriorField& prior, const Dataset& data) {
  if (data.observations.empty()) throw ConfigError("posterior needs at least one observation");
  const ModelSpec model = base.chart().name == prior.chart() ? base : base.with_chart(prior.chart());
  const std::size_t n = prior.size();
  if (prior.support.cell_volumes.size() != n) throw ConfigError("prior field has no cell volumes");

  std::vector<Vec> sorted = data.observations;
  std::sort(sorted.begin(), sorted.end(), [](const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });

  // Unnormalized log mass per cell.
  std::vector<double> log_mass(n);
  parallel_for(n, [&](std::size_t i) {
    const Vec& theta = prior.support.points[i];
    if (!(prior.values[i] > 0.0)) throw NumericalError("prior value must be positive at " + format_vector(theta));
    model.require_interior(theta);
    const BoundLogDensity log_p = model.log_density_at(model.to_reference(theta));
    double ll = 0.0;
    for (const Vec& x : sorted) ll += log_p(x);
    log_mass[i] = ll + std::log(prior.values[i]) + std::log(prior.support.cell_volumes[i]);
  });

  const double top = *std::max_element(log_mass.begin(), log_mass.end());
  if (!std::isfinite(top))
    throw NumericalError("the data have zero likelihood at every grid point (posterior undefined)");
  double acc = 0.0;
  for (double v : log_mass) acc += std::exp(v - top);
  const double log_z = top + std::log(acc);

  PosteriorGrid post;
  post.support = prior.support;
  post.masses.resize(n);
  post.log_values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    post.masses[i] = std::exp(log_mass[i] - log_z);
    post.log_values[i] = log_mass[i] - log_z - std::log(prior.support.cell_volumes[i]);
  }
  return post;
}

PosteriorComparison posterior_compare(const PosteriorGrid& a, const PosteriorGrid& b) {
  if (a.size() != b.size() || a.support.chart != b.support.chart)
    throw ConfigError("posteriors are defined on different grids");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.support.points[i] != b.support.points[i]) throw ConfigError("posteriors are defined on different grids");

  auto kl = [](const std::vector<double>& p, const std::vector<double>& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == 0.0) continue;
      if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
      s += p[i] * std::log(p[i] / q[i]);
    }
    return std::max(0.0, s);
  };
  PosteriorComparison c;
  c.kl_ab = kl(a.masses, b.masses);
  c.kl_ba = kl(b.masses, a.masses);
  for (std::size_t i = 0; i < a.size(); ++i) c.total_variation += std::abs(a.masses[i] - b.masses[i]);
  c.total_variation *= 0.5;
  return c;
}

void write_posterior_csv(const PosteriorGrid& posterior, std::ostream& out) {
  for (const auto& c : posterior.support.coordinates) out << c << ',';
  out << "log_density,mass\n";
  for (std::size_t i = 0; i < posterior.size(); ++i) {
    const Vec& p = posterior.support.points[i];
    for (Eigen::Index k = 0; k < p.size(); ++k) out << format_double(p[k]) << ',';
    out << format_double(posterior.log_values[i]) << ',' << format_double(posterior.masses[i]) << '\n';
  }
}

Dataset simulate_observations(const ModelSpec& model, const Vec& theta, std::size_t n, std::uint64_t seed) {
  model.require_interior(theta);
  const Vec ref = model.to_reference(theta);
  std::mt19937_64 rng(seed);
  Dataset data;
  data.source = "simulated(seed=" + std::to_string(seed) + ")";
  data.observations.reserve(n);
  const int d = model.sample_space.dimension;
  if (model.sample_space.kind == SampleKind::continuous) {
    // Gaussian families: location + scale * standard normal draws.
    const Standardization st = model.sample_space.standardize(ref);
    std::normal_distribution<double> normal;
    for (std::size_t i = 0; i < n; ++i) {
      Vec z(d);
      for (int a = 0; a < d; ++a) z[a] = normal(rng);
      data.observations.push_back(st.location + st.scale * z);
    }
    return data;
  }
  // Discrete families: inverse-CDF sampling over the truncated support.
  const auto support = model.sample_space.support(ref, model.sample_space.tail_bound);
  std::vector<double> cdf;
  double acc = 0.0;
  for (double k : support) {
    acc += std::exp(model.log_density_ref(Vec::Constant(1, k), ref));
    cdf.push_back(acc);
  }
  std::uniform_real_distribution<double> uniform(0.0, acc);
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), uniform(rng));
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), support.size() - 1);
    data.observations.push_back(Vec::Constant(1, support[idx]));
  }
  return data;
}

bool cell_contains(const PointSet& support, std::size_t i, const Vec& theta) {
  const Vec& c = support.points[i];
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    std::set<double> nodes;
    for (const auto& p : support.points) nodes.insert(p[k]);
    auto it = nodes.find(c[k]);
    const double lo = it == nodes.begin() ? -std::numeric_limits<double>::infinity() : 0.5 * (*std::prev(it) + c[k]);
    const auto nx = std::next(it);
    const double hi = nx == nodes.end() ? std::numeric_limits<double>::infinity() : 0.5 * (*nx + c[k]);
    if (!(theta[k] >= lo && theta[k] < hi)) return false;
  }
  return true;
}

}  // namespace weylprior
