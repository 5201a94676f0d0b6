#pragma once

#include "weylprior/linalg.hpp"
#include "weylprior/numerics/differentiation.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace weylprior {

/// Interiority margin applied to open chart constraints (σ² > ε, Σ - εI SPD, ...).
inline constexpr double kDomainMargin = 1e-10;

/// One coordinate system on a model's parameter manifold.
///
/// Every chart knows how to map to and from the model's reference chart; for
/// the reference chart itself both maps are the identity.
struct Chart {
  std::string name;
  std::vector<std::string> coordinates;
  std::function<bool(const Vec&, double)> domain;
  std::function<Vec(const Vec&)> to_reference;
  std::function<Vec(const Vec&)> from_reference;
  /// ∂θ_ref / ∂θ at θ (rows: reference coordinates).
  std::function<Mat(const Vec&)> reference_jacobian;

  int dim() const { return static_cast<int>(coordinates.size()); }
  bool contains(const Vec& theta, double margin = kDomainMargin) const;
  std::optional<int> coordinate_index(std::string_view name) const;
};

enum class SampleKind { continuous, discrete };

/// Location/scale used to map standard-normal quadrature nodes onto the sample space.
struct Standardization {
  Vec location;
  Mat scale;  // lower-triangular (Cholesky factor of the covariance)
};

struct SampleSpace {
  SampleKind kind = SampleKind::continuous;
  int dimension = 1;
  /// Continuous models: standardization hint at a reference-chart θ.
  std::function<Standardization(const Vec&)> standardize;
  /// Discrete models: scalar support points at a reference-chart θ, truncated
  /// so the omitted mass is below `tail_bound`.
  std::function<std::vector<double>(const Vec&, double)> support;
  double tail_bound = 1e-12;
};

/// log p(x | θ) and its score, both in the reference chart.
using LogDensityFn = std::function<double(const Vec&, const Vec&)>;
using ScoreFn = std::function<Vec(const Vec&, const Vec&)>;

/// Evaluators with the θ-dependent work (factorizations, logs) done once.
using BoundLogDensity = std::function<double(const Vec&)>;
using BoundScore = std::function<void(const Vec&, Vec&)>;

struct LogPartition {
  std::string chart;  // chart in which `value` is the cumulant function
  std::function<double(const Vec&)> value;
};

/// A parametric family together with the chart it is currently viewed in.
///
/// Evaluators are pure; a ModelSpec can be shared across threads.
struct ModelSpec {
  std::string id;
  int manifold_dim = 0;
  SampleSpace sample_space;
  std::vector<Chart> charts;  // charts[0] is the reference chart
  std::size_t active_chart = 0;
  LogDensityFn log_density_ref;
  std::optional<ScoreFn> analytic_score;
  /// Optional fast paths for a fixed reference-chart θ; must agree with
  /// log_density_ref and analytic_score.
  std::function<BoundLogDensity(const Vec&)> bind_log_density;
  std::function<BoundScore(const Vec&)> bind_score;
  std::optional<LogPartition> log_partition;
  Vec default_anchor;  // reference chart

  const Chart& chart() const { return charts[active_chart]; }
  const Chart& reference_chart() const { return charts.front(); }
  const Chart& find_chart(std::string_view name) const;

  /// Same family, evaluated in another chart.
  ModelSpec with_chart(std::string_view name) const;

  Vec to_reference(const Vec& theta) const { return chart().to_reference(theta); }
  Vec from_reference(const Vec& theta_ref) const { return chart().from_reference(theta_ref); }
  Vec anchor() const { return from_reference(default_anchor); }

  bool contains(const Vec& theta, double margin = kDomainMargin) const;
  /// Throws DomainError naming the chart and θ when θ is not interior.
  void require_interior(const Vec& theta, double margin = kDomainMargin) const;
  DomainCheck domain_check(double margin = kDomainMargin) const;

  /// x ↦ log p(x | θ_ref), through bind_log_density when present.
  BoundLogDensity log_density_at(const Vec& theta_ref) const;
};

struct ModelConfig {
  int n = 1;  // data dimension of gaussian_mv
};

/// Built-in families: gaussian1d, gaussian_mv, bernoulli, poisson.
ModelSpec get_model(std::string_view id, const ModelConfig& config = {});

/// Parses the CLI selector syntax `gaussian1d | gaussian_mv:n | bernoulli | poisson`.
ModelSpec parse_model(std::string_view selector);

double log_density(const ModelSpec& model, const Vec& x, const Vec& theta);

/// ∂_i log p(x|θ) in the model's active chart. Uses the analytic score pulled
/// back through the chart Jacobian, or central differences of log_density when
/// the model has none.
Vec score(const ModelSpec& model, const Vec& x, const Vec& theta, const DiffSpec& diff = {});

/// Score evaluator bound to one θ; the chart Jacobian is computed once.
class ScoreAt {
 public:
  ScoreAt(const ModelSpec& model, const Vec& theta, const DiffSpec& diff = {});
  Vec operator()(const Vec& x) const;
  /// Writes the score into `out` (resized to the manifold dimension).
  void into(const Vec& x, Vec& out) const;
  const Vec& theta_ref() const { return theta_ref_; }

 private:
  Vec fd_score(const Vec& x) const;

  const ModelSpec* model_;
  Vec theta_;
  Vec theta_ref_;
  Mat jacobian_t_;
  bool identity_jacobian_ = false;
  BoundScore bound_;
  DiffSpec diff_;
};

/// vech index helpers for symmetric n x n matrices (upper triangle, row-major).
int vech_size(int n);
Vec vech(const Mat& sym);
Mat unvech(const Eigen::Ref<const Vec>& v, int n);

}  // namespace weylprior
