#pragma once

#include "weylprior/linalg.hpp"
#include "weylprior/models.hpp"

#include <functional>
#include <span>
#include <vector>

namespace weylprior {

/// Gauss–Hermite rule for the standard normal: E[f(Z)] ≈ Σ_k w_k f(z_k).
///
/// Nodes come from the Golub–Welsch eigenproblem and are polished by Newton
/// steps on the orthonormal Hermite recurrence; weights are the reciprocal
/// Christoffel function, so they stay positive and accurate in the tails.
class GaussHermiteRule {
 public:
  explicit GaussHermiteRule(int nodes);

  /// Shared immutable rule for `nodes` points (thread-safe).
  static const GaussHermiteRule& cached(int nodes);

  int size() const { return static_cast<int>(nodes_.size()); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

struct QuadratureSpec {
  /// Nodes per sample dimension; 0 picks 64 (d = 1), 32 (d = 2) or 8 (d >= 3).
  int nodes = 0;

  int nodes_for(int sample_dim) const;
};

/// Nodes (columns of `points`) and weights of the expectation rule at one θ.
struct ExpectationNodes {
  Mat points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Continuous models: tensor Gauss–Hermite grid mapped through the model's
/// standardization, weights corrected by p(x|θ)/q(x) for the standardized
/// Gaussian q. Discrete models: the truncated support with weights p(x|θ).
/// Nodes of zero weight are dropped.
ExpectationNodes expectation_nodes(const ModelSpec& model, const Vec& theta, const QuadratureSpec& quad);

/// Calls visit(x, weight) for every node of the expectation rule at θ.
void for_each_node(const ModelSpec& model, const Vec& theta, const QuadratureSpec& quad,
                   const std::function<void(const Vec&, double)>& visit);

/// E_θ[f(X)].
double expect(const ModelSpec& model, const Vec& theta, const std::function<double(const Vec&)>& f,
              const QuadratureSpec& quad = {});

}  // namespace weylprior
