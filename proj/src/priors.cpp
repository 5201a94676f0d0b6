#include "weylprior/priors.hpp"

#include "weylprior/errors.hpp"
#include "weylprior/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace weylprior {

namespace {

double parse_number(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ConfigError("bad number '" + std::string(text) + "' in " + std::string(what));
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::vector<double> GridAxis::values() const {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    v[i] = spacing == Spacing::log ? std::exp(std::log(min) + t * (std::log(max) - std::log(min)))
                                   : min + t * (max - min);
  }
  v.front() = min;
  v.back() = max;
  return v;
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= static_cast<std::size_t>(a.count);
  return n;
}

void GridSpec::validate(const Chart& c) const {
  for (const auto& a : axes) {
    if (!c.coordinate_index(a.name)) throw ConfigError("grid axis '" + a.name + "' is not a coordinate of chart " + c.name);
    if (a.count < 2) throw ConfigError("grid axis '" + a.name + "' needs count >= 2");
    if (!(a.min < a.max)) throw ConfigError("grid axis '" + a.name + "' needs min < max");
    if (a.spacing == Spacing::log && !(a.min > 0.0))
      throw ConfigError("log-spaced grid axis '" + a.name + "' must be positive");
    if (fixed.count(a.name)) throw ConfigError("coordinate '" + a.name + "' is both gridded and fixed");
  }
  for (const auto& [name, value] : fixed)
    if (!c.coordinate_index(name)) throw ConfigError("fixed coordinate '" + name + "' is not in chart " + c.name);
  for (const auto& coord : c.coordinates) {
    const bool on_axis = std::any_of(axes.begin(), axes.end(), [&](const GridAxis& a) { return a.name == coord; });
    if (!on_axis && !fixed.count(coord))
      throw ConfigError("coordinate '" + coord + "' of chart " + c.name + " is neither gridded nor fixed");
  }
}

GridSpec parse_grid(std::string_view text, std::string chart) {
  GridSpec grid;
  grid.chart = std::move(chart);
  for (auto entry : split(text, ',')) {
    const auto eq = entry.find('=');
    if (entry.empty() || eq == std::string_view::npos || eq == 0)
      throw ConfigError("grid entry '" + std::string(entry) + "' is not name=min:max:count[:log] or name=value");
    const std::string name(entry.substr(0, eq));
    const auto fields = split(entry.substr(eq + 1), ':');
    if (fields.size() == 1) {
      grid.fixed[name] = parse_number(fields[0], "grid entry " + name);
      continue;
    }
    if (fields.size() != 3 && fields.size() != 4)
      throw ConfigError("grid entry '" + std::string(entry) + "' is not name=min:max:count[:log]");
    GridAxis axis;
    axis.name = name;
    axis.min = parse_number(fields[0], "grid entry " + name);
    axis.max = parse_number(fields[1], "grid entry " + name);
    const double count = parse_number(fields[2], "grid entry " + name);
    if (count != std::floor(count) || count < 2 || count > 1e7)
      throw ConfigError("grid entry '" + name + "' needs an integer count >= 2");
    axis.count = static_cast<int>(count);
    if (fields.size() == 4) {
      if (fields[3] == "log")
        axis.spacing = Spacing::log;
      else if (fields[3] != "lin" && fields[3] != "linear")
        throw ConfigError("grid spacing must be 'log' or 'lin', got '" + std::string(fields[3]) + "'");
    }
    grid.axes.push_back(axis);
  }
  return grid;
}

std::vector<double> trapezoid_weights(const std::vector<double>& nodes) {
  const std::size_t n = nodes.size();
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  w[0] = 0.5 * (nodes[1] - nodes[0]);
  w[n - 1] = 0.5 * (nodes[n - 1] - nodes[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) w[i] = 0.5 * (nodes[i + 1] - nodes[i - 1]);
  return w;
}

PointSet grid_points(const ModelSpec& base, const GridSpec& grid) {
  const ModelSpec model = grid.chart.empty() ? base : base.with_chart(grid.chart);
  const Chart& c = model.chart();
  grid.validate(c);

  PointSet set;
  set.chart = c.name;
  set.coordinates = c.coordinates;
  set.grid = grid;
  set.grid->chart = c.name;

  Vec base_point(c.dim());
  for (const auto& [name, value] : grid.fixed) base_point[*c.coordinate_index(name)] = value;

  std::vector<std::vector<double>> values, weights;
  std::vector<int> slot;
  for (const auto& a : grid.axes) {
    values.push_back(a.values());
    weights.push_back(trapezoid_weights(values.back()));
    slot.push_back(*c.coordinate_index(a.name));
  }

  const std::size_t total = grid.size();
  set.points.reserve(total);
  set.cell_volumes.reserve(total);
  std::vector<std::size_t> idx(grid.axes.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    Vec p = base_point;
    double vol = 1.0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      p[slot[a]] = values[a][idx[a]];
      vol *= weights[a][idx[a]];
    }
    if (!model.contains(p)) throw DomainError("grid point " + format_vector(p) + " is outside chart " + c.name);
    set.points.push_back(std::move(p));
    set.cell_volumes.push_back(vol);
    // last axis fastest
    for (std::size_t a = idx.size(); a-- > 0;) {
      if (++idx[a] < static_cast<std::size_t>(grid.axes[a].count)) break;
      idx[a] = 0;
    }
  }
  return set;
}

std::string to_string(PriorKind kind) {
  switch (kind) {
    case PriorKind::uniform:
      return "uniform";
    case PriorKind::jeffreys:
      return "jeffreys";
    case PriorKind::alpha:
      return "alpha";
    case PriorKind::weyl:
      return "weyl";
    case PriorKind::tabulated:
      return "tabulated";
  }
  return "unknown";
}

PriorKind parse_prior_kind(std::string_view text) {
  if (text == "uniform") return PriorKind::uniform;
  if (text == "jeffreys") return PriorKind::jeffreys;
  if (text == "alpha") return PriorKind::alpha;
  if (text == "weyl") return PriorKind::weyl;
  throw ConfigError("unknown prior kind '" + std::string(text) + "' (uniform, jeffreys, alpha, weyl)");
}

namespace {

ModelSpec in_chart(const ModelSpec& model, const PointSet& points) {
  return model.chart().name == points.chart ? model : model.with_chart(points.chart);
}

void check_values(const PriorField& field) {
  for (std::size_t i = 0; i < field.values.size(); ++i)
    if (!(field.values[i] > 0.0) || !std::isfinite(field.values[i]))
      throw NumericalError(to_string(field.kind) + " prior is not positive and finite at " +
                           format_vector(field.support.points[i]));
}

// Shared builder: value = exp(scale · Ω) · √det g, with Ω skipped when scale == 0.
PriorField omega_field(const ModelSpec& base, const PointSet& points, double omega_scale, const Vec& anchor,
                       const GeometryOptions& opts) {
  const ModelSpec model = in_chart(base, points);
  const std::size_t n = points.points.size();
  std::vector<double> values(n);
  const bool need_omega = omega_scale != 0.0;
  if (need_omega) model.require_interior(anchor);
  parallel_for(n, [&](std::size_t i) {
    const Vec& theta = points.points[i];
    const double root = sqrt_det_metric(fisher_metric(model, theta, opts.quad));
    if (!need_omega) {
      values[i] = root;
      return;
    }
    GeometryOptions local = opts;
    // Path independence is spot-checked at the ends and the middle of the set.
    local.spot_check_paths = opts.spot_check_paths && (i == 0 || i == n - 1 || i == n / 2);
    const double omega = potential_omega(model, theta, anchor, local).omega;
    values[i] = std::exp(omega_scale * omega) * root;
  });
  PriorField field;
  field.support = points;
  field.values = std::move(values);
  if (need_omega) field.anchor = anchor;
  return field;
}

}  // namespace

PriorField uniform_field(const PointSet& points) {
  PriorField field;
  field.support = points;
  field.values.assign(points.points.size(), 1.0);
  field.kind = PriorKind::uniform;
  return field;
}

PriorField uniform_field(const ModelSpec& model, const GridSpec& grid) { return uniform_field(grid_points(model, grid)); }

PriorField jeffreys_field(const ModelSpec& model, const PointSet& points, const GeometryOptions& opts) {
  PriorField field = omega_field(model, points, 0.0, Vec(), opts);
  field.kind = PriorKind::jeffreys;
  check_values(field);
  return field;
}

PriorField jeffreys_field(const ModelSpec& model, const GridSpec& grid, const GeometryOptions& opts) {
  return jeffreys_field(model, grid_points(model, grid), opts);
}

PriorField alpha_prior_field(const ModelSpec& model, const PointSet& points, double alpha, const Vec& anchor,
                             const GeometryOptions& opts) {
  PriorField field = omega_field(model, points, -0.5 * alpha, anchor, opts);
  field.kind = PriorKind::alpha;
  field.alpha = alpha;
  field.anchor = anchor;
  check_values(field);
  return field;
}

PriorField alpha_prior_field(const ModelSpec& model, const GridSpec& grid, double alpha, const Vec& anchor,
                             const GeometryOptions& opts) {
  return alpha_prior_field(model, grid_points(model, grid), alpha, anchor, opts);
}

PriorField weyl_prior_field(const ModelSpec& model, const PointSet& points, const Vec& anchor,
                            const GeometryOptions& opts) {
  PriorField field = omega_field(model, points, 0.5 * model.manifold_dim, anchor, opts);
  field.kind = PriorKind::weyl;
  field.anchor = anchor;
  check_values(field);
  return field;
}

PriorField weyl_prior_field(const ModelSpec& model, const GridSpec& grid, const Vec& anchor,
                            const GeometryOptions& opts) {
  return weyl_prior_field(model, grid_points(model, grid), anchor, opts);
}

PriorField normalize_over_grid(PriorField field) {
  double total = 0.0;
  for (std::size_t i = 0; i < field.values.size(); ++i) total += field.values[i] * field.support.cell_volumes[i];
  if (!(total > 0.0) || !std::isfinite(total)) throw NumericalError("prior mass over the grid is not positive");
  for (double& v : field.values) v /= total;
  field.normalized = true;
  return field;
}

double relative_spread(const PriorField& field) {
  const auto [lo, hi] = std::minmax_element(field.values.begin(), field.values.end());
  double mean = 0.0;
  for (double v : field.values) mean += v;
  mean /= static_cast<double>(field.values.size());
  return (*hi - *lo) / mean;
}

TheoremCheck theorem_ratio_check(const ModelSpec& model, const GridSpec& grid, const Vec& anchor,
                                 const GeometryOptions& opts, std::optional<double> alpha) {
  const PointSet points = grid_points(model, grid);
  TheoremCheck check;
  check.alpha = alpha.value_or(-static_cast<double>(model.manifold_dim));
  const PriorField weyl = weyl_prior_field(model, points, anchor, opts);
  const PriorField par = alpha_prior_field(model, points, check.alpha, anchor, opts);
  std::vector<double> ratio(weyl.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < ratio.size(); ++i) {
    ratio[i] = weyl.values[i] / par.values[i];
    mean += ratio[i];
  }
  mean /= static_cast<double>(ratio.size());
  check.mean_ratio = mean;
  for (double r : ratio) check.max_rel_deviation = std::max(check.max_rel_deviation, std::abs(r / mean - 1.0));
  return check;
}

PriorField reparam_transform(const PriorField& field, const ModelSpec& model, std::string_view target_chart) {
  const Chart& source = model.find_chart(field.chart());
  const Chart& target = model.find_chart(target_chart);

  auto map_point = [&](const Vec& theta) -> Vec {
    const Vec mapped = target.from_reference(source.to_reference(theta));
    if (!target.contains(mapped))
      throw DomainError("point " + format_vector(theta) + " maps outside chart " + target.name);
    return mapped;
  };

  PriorField out = field;
  out.support.chart = target.name;
  out.support.coordinates = target.coordinates;
  out.support.grid.reset();
  for (std::size_t i = 0; i < field.size(); ++i) {
    const Vec& theta = field.support.points[i];
    const Vec mapped = map_point(theta);
    // ∂θ/∂θ' = (∂ref/∂θ)^{-1} (∂ref/∂θ')
    const Mat d = source.reference_jacobian(theta).partialPivLu().solve(target.reference_jacobian(mapped));
    const double jac = std::abs(d.determinant());
    if (!(jac > 0.0) || !std::isfinite(jac))
      throw NumericalError("singular chart Jacobian at " + format_vector(theta));
    out.support.points[i] = mapped;
    out.values[i] = field.values[i] * jac;
    out.support.cell_volumes[i] = field.support.cell_volumes[i] / jac;
  }
  if (field.anchor) out.anchor = map_point(*field.anchor);
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw NumericalError("cannot format number");
  return std::string(buf, ptr);
}

}  // namespace weylprior
