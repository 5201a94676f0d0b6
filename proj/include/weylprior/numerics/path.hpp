#pragma once

#include "weylprior/linalg.hpp"
#include "weylprior/numerics/differentiation.hpp"

#include <functional>
#include <vector>

namespace weylprior {

/// Piecewise-linear curve through `waypoints`, each segment cut into `steps` pieces.
struct Path {
  std::vector<Vec> waypoints;
  int steps = 256;
};

using OneFormField = std::function<Vec(const Vec&)>;

Path straight_path(const Vec& from, const Vec& to, int steps = 256);

/// Axis-aligned path: coordinates are moved from `from` to `to` one at a time,
/// in index order.
Path staircase_path(const Vec& from, const Vec& to, int steps = 256);

/// True when every waypoint and every midpoint sample lies inside the domain.
bool path_in_domain(const Path& path, const DomainCheck& inside);

/// ∫_c ω by the composite midpoint rule (second order in 1/steps).
double line_integral(const OneFormField& omega, const Path& path, const DomainCheck& inside = {});

/// Composite 3-point Gauss-Legendre rule, `steps` panels per segment (sixth order).
double line_integral_gauss(const OneFormField& omega, const Path& path, const DomainCheck& inside = {});

}  // namespace weylprior
