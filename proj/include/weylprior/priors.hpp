#pragma once

#include "weylprior/geometry.hpp"
#include "weylprior/linalg.hpp"
#include "weylprior/models.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace weylprior {

enum class Spacing { linear, log };

struct GridAxis {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  int count = 2;
  Spacing spacing = Spacing::linear;

  std::vector<double> values() const;
};

/// Rectilinear grid over some coordinates of a chart; every other coordinate
/// is pinned by `fixed`. Points are ordered with the first axis outermost.
struct GridSpec {
  std::string chart;  // empty: the model's active chart
  std::vector<GridAxis> axes;
  std::map<std::string, double> fixed;

  std::size_t size() const;
  void validate(const Chart& chart) const;
};

/// Parses "name=min:max:count[:log],..."; an entry "name=value" pins a coordinate.
GridSpec parse_grid(std::string_view text, std::string chart = {});

/// Trapezoid weights of sorted 1-D nodes (half cells at the ends).
std::vector<double> trapezoid_weights(const std::vector<double>& nodes);

/// Parameter points with coordinate (Lebesgue) cell volumes.
struct PointSet {
  std::string chart;
  std::vector<std::string> coordinates;
  std::vector<Vec> points;
  std::vector<double> cell_volumes;
  std::optional<GridSpec> grid;
};

PointSet grid_points(const ModelSpec& model, const GridSpec& grid);

enum class PriorKind { uniform, jeffreys, alpha, weyl, tabulated };

std::string to_string(PriorKind kind);
PriorKind parse_prior_kind(std::string_view text);

/// Prior density values over a point set, defined up to a positive constant.
struct PriorField {
  PointSet support;
  std::vector<double> values;
  PriorKind kind = PriorKind::jeffreys;
  double alpha = 0.0;
  std::optional<Vec> anchor;
  bool normalized = false;

  std::size_t size() const { return values.size(); }
  const std::string& chart() const { return support.chart; }
};

PriorField uniform_field(const ModelSpec& model, const GridSpec& grid);
PriorField uniform_field(const PointSet& points);

PriorField jeffreys_field(const ModelSpec& model, const GridSpec& grid, const GeometryOptions& opts = {});
PriorField jeffreys_field(const ModelSpec& model, const PointSet& points, const GeometryOptions& opts = {});

/// exp(−(α/2) Ω(θ; anchor)) √det g(θ).
PriorField alpha_prior_field(const ModelSpec& model, const GridSpec& grid, double alpha, const Vec& anchor,
                             const GeometryOptions& opts = {});
PriorField alpha_prior_field(const ModelSpec& model, const PointSet& points, double alpha, const Vec& anchor,
                             const GeometryOptions& opts = {});

/// exp((m/2) Ω(θ; anchor)) √det g(θ), m the manifold dimension.
PriorField weyl_prior_field(const ModelSpec& model, const GridSpec& grid, const Vec& anchor,
                            const GeometryOptions& opts = {});
PriorField weyl_prior_field(const ModelSpec& model, const PointSet& points, const Vec& anchor,
                            const GeometryOptions& opts = {});

/// Rescales so that Σ value · cell volume = 1.
PriorField normalize_over_grid(PriorField field);

/// (max − min) / mean of the field values.
double relative_spread(const PriorField& field);

struct TheoremCheck {
  double alpha = 0.0;
  double mean_ratio = 0.0;
  double max_rel_deviation = 0.0;
};

/// Ratio of the Weyl prior to the α-parallel prior (α = −m unless given),
/// and its largest relative deviation from the grid mean.
TheoremCheck theorem_ratio_check(const ModelSpec& model, const GridSpec& grid, const Vec& anchor,
                                 const GeometryOptions& opts = {}, std::optional<double> alpha = std::nullopt);

/// Density change of variables ω'(θ') = ω(θ(θ')) |det ∂θ/∂θ'| onto another
/// chart of the same model; cell volumes and the anchor are mapped as well.
PriorField reparam_transform(const PriorField& field, const ModelSpec& model, std::string_view target_chart);

// CSV: one column per coordinate, then "value"; header row; shortest
// round-trip decimal formatting.
void write_prior_csv(const PriorField& field, std::ostream& out);
PriorField read_prior_csv(std::istream& in, const ModelSpec& model, const std::string& source = "<stream>");

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace weylprior
