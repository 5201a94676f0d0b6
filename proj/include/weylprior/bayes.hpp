#pragma once

#include "weylprior/linalg.hpp"
#include "weylprior/models.hpp"
#include "weylprior/priors.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace weylprior {

struct Dataset {
  std::vector<Vec> observations;
  std::string source;

  std::size_t size() const { return observations.size(); }
};

/// Headerless CSV, one observation per row with one column per sample dimension.
Dataset load_observations(const std::filesystem::path& path, const ModelSpec& model);
Dataset parse_observations(std::istream& in, const ModelSpec& model, const std::string& source = "<stream>");

/// Posterior over the prior's point set. `log_values` is the normalized log
/// posterior density at each point; `masses` are density times cell volume and
/// sum to one.
struct PosteriorGrid {
  PointSet support;
  std::vector<double> log_values;
  std::vector<double> masses;

  std::size_t size() const { return masses.size(); }
  /// Index of the largest posterior density.
  std::size_t mode_index() const;
};

/// log π(θ|x) = Σ_n log p(x_n|θ) + log π(θ) − log Z, normalized by log-sum-exp.
/// Observations are summed in sorted order, so any permutation of the data
/// gives a bit-identical result.
PosteriorGrid grid_posterior(const ModelSpec& model, const PriorField& prior, const Dataset& data);

struct PosteriorComparison {
  double kl_ab = 0.0;
  double kl_ba = 0.0;
  double total_variation = 0.0;
};

PosteriorComparison posterior_compare(const PosteriorGrid& a, const PosteriorGrid& b);

/// Columns: coordinates, "log_density", "mass".
void write_posterior_csv(const PosteriorGrid& posterior, std::ostream& out);

/// Draws n observations from the model at θ with a seeded mt19937_64.
Dataset simulate_observations(const ModelSpec& model, const Vec& theta, std::size_t n, std::uint64_t seed);

/// Half-open cell [lo, hi) per coordinate around support point i, bounded by
/// the midpoints to the neighbouring grid nodes.
bool cell_contains(const PointSet& support, std::size_t i, const Vec& theta);

}  // namespace weylprior
