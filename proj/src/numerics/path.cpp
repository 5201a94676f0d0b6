#include "weylprior/numerics/path.hpp"

#include "weylprior/errors.hpp"

#include <cmath>

namespace weylprior {

Path straight_path(const Vec& from, const Vec& to, int steps) { return Path{{from, to}, steps}; }

Path staircase_path(const Vec& from, const Vec& to, int steps) {
  Path path{{from}, steps};
  Vec cur = from;
  for (Eigen::Index i = 0; i < from.size(); ++i) {
    if (cur[i] == to[i]) continue;
    cur[i] = to[i];
    path.waypoints.push_back(cur);
  }
  if (path.waypoints.size() == 1) path.waypoints.push_back(to);
  return path;
}

namespace {

void validate(const Path& path) {
  if (path.waypoints.size() < 2) throw ConfigError("a path needs at least two waypoints");
  if (path.steps < 1) throw ConfigError("a path needs at least one step per segment");
}

double midpoint_rule(const OneFormField& omega, const Path& path, int steps, const DomainCheck& inside) {
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < path.waypoints.size(); ++s) {
    const Vec& a = path.waypoints[s];
    const Vec delta = (path.waypoints[s + 1] - a) / steps;
    if (delta.isZero(0.0)) continue;
    double segment = 0.0;
    for (int k = 0; k < steps; ++k) {
      const Vec p = a + (k + 0.5) * delta;
      if (inside && !inside(p)) throw DomainError("path leaves the domain at " + format_vector(p));
      const Vec w = omega(p);
      if (!w.allFinite()) throw NumericalError("one-form is not finite at " + format_vector(p));
      segment += w.dot(delta);
    }
    total += segment;
  }
  return total;
}

}  // namespace

bool path_in_domain(const Path& path, const DomainCheck& inside) {
  if (!inside) return true;
  for (const Vec& w : path.waypoints)
    if (!inside(w)) return false;
  for (std::size_t s = 0; s + 1 < path.waypoints.size(); ++s) {
    const Vec& a = path.waypoints[s];
    const Vec delta = (path.waypoints[s + 1] - a) / (2 * path.steps);
    for (int k = 0; k < 2 * path.steps; ++k)
      if (!inside(a + (k + 0.5) * delta)) return false;
  }
  return true;
}

double line_integral(const OneFormField& omega, const Path& path, const DomainCheck& inside) {
  validate(path);
  return midpoint_rule(omega, path, path.steps, inside);
}

double line_integral_gauss(const OneFormField& omega, const Path& path, const DomainCheck& inside) {
  validate(path);
  // 3-point Gauss-Legendre nodes and weights on [0, 1].
  static const double r = std::sqrt(0.15);
  static const double nodes[3] = {0.5 - r, 0.5, 0.5 + r};
  static const double weights[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < path.waypoints.size(); ++s) {
    const Vec& a = path.waypoints[s];
    const Vec delta = (path.waypoints[s + 1] - a) / path.steps;
    if (delta.isZero(0.0)) continue;
    double segment = 0.0;
    for (int k = 0; k < path.steps; ++k) {
      double panel = 0.0;
      for (int q = 0; q < 3; ++q) {
        const Vec p = a + (k + nodes[q]) * delta;
        if (inside && !inside(p)) throw DomainError("path leaves the domain at " + format_vector(p));
        const Vec w = omega(p);
        if (!w.allFinite()) throw NumericalError("one-form is not finite at " + format_vector(p));
        panel += weights[q] * w.dot(delta);
      }
      segment += panel;
    }
    total += segment;
  }
  return total;
}

}  // namespace weylprior
