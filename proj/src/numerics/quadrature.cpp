#include "weylprior/numerics/quadrature.hpp"

#include "weylprior/errors.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace weylprior {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Orthonormal probabilists' Hermite polynomials p_0..p_n at z.
// p_{k+1} = (z p_k - √k p_{k-1}) / √(k+1).
void hermite_values(double z, int n, std::vector<double>& p) {
  p.assign(static_cast<std::size_t>(n) + 1, 0.0);
  p[0] = 1.0;
  if (n >= 1) p[1] = z;
  for (int k = 1; k < n; ++k)
    p[k + 1] = (z * p[k] - std::sqrt(static_cast<double>(k)) * p[k - 1]) / std::sqrt(k + 1.0);
}

}  // namespace

GaussHermiteRule::GaussHermiteRule(int n) {
  if (n < 2) throw ConfigError("Gauss-Hermite rule needs at least 2 nodes, got " + std::to_string(n));
  // Jacobi matrix of the standard-normal weight: zero diagonal, off-diagonal √k.
  Mat jacobi = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Mat> eig(jacobi);
  if (eig.info() != Eigen::Success) throw NumericalError("Golub-Welsch eigensolver failed");

  nodes_.resize(static_cast<std::size_t>(n));
  weights_.resize(static_cast<std::size_t>(n));
  std::vector<double> p;
  for (int i = 0; i < n; ++i) {
    double z = eig.eigenvalues()[i];
    for (int it = 0; it < 8; ++it) {
      hermite_values(z, n, p);
      const double dz = p[n] / (std::sqrt(static_cast<double>(n)) * p[n - 1]);
      z -= dz;
      if (std::abs(dz) <= 1e-16 * std::max(1.0, std::abs(z))) break;
    }
    hermite_values(z, n, p);
    double christoffel = 0.0;
    for (int k = 0; k < n; ++k) christoffel += p[k] * p[k];
    nodes_[i] = z;
    weights_[i] = 1.0 / christoffel;
  }
  // Exact antisymmetry of the rule keeps odd moments at zero.
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double z = 0.5 * (nodes_[j] - nodes_[i]);
    const double w = 0.5 * (weights_[i] + weights_[j]);
    nodes_[i] = -z;
    nodes_[j] = z;
    weights_[i] = weights_[j] = w;
  }
  if (n % 2 == 1) nodes_[n / 2] = 0.0;
}

const GaussHermiteRule& GaussHermiteRule::cached(int nodes) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussHermiteRule>> rules;
  std::lock_guard lock(mutex);
  auto& slot = rules[nodes];
  if (!slot) slot = std::make_unique<GaussHermiteRule>(nodes);
  return *slot;
}

int QuadratureSpec::nodes_for(int sample_dim) const {
  if (nodes > 0) return nodes;
  if (sample_dim <= 1) return 64;
  if (sample_dim == 2) return 32;
  return 8;
}

ExpectationNodes expectation_nodes(const ModelSpec& model, const Vec& theta, const QuadratureSpec& quad) {
  model.require_interior(theta);
  const Vec ref = model.to_reference(theta);
  const auto& space = model.sample_space;
  const BoundLogDensity log_p = model.log_density_at(ref);
  ExpectationNodes out;

  if (space.kind == SampleKind::discrete) {
    const auto support = space.support(ref, space.tail_bound);
    out.points.resize(1, static_cast<Eigen::Index>(support.size()));
    Vec x(1);
    Eigen::Index col = 0;
    for (double k : support) {
      x[0] = k;
      const double w = std::exp(log_p(x));
      if (!(w > 0.0)) continue;
      out.points(0, col++) = k;
      out.weights.push_back(w);
    }
    out.points.conservativeResize(1, col);
    return out;
  }

  const Standardization st = space.standardize(ref);
  const int d = space.dimension;
  const auto& rule = GaussHermiteRule::cached(quad.nodes_for(d));
  const int k = rule.size();
  const double log_det_scale = st.scale.diagonal().array().abs().log().sum();
  Eigen::Index total = 1;
  for (int a = 0; a < d; ++a) total *= k;
  out.points.resize(d, total);
  out.weights.reserve(static_cast<std::size_t>(total));

  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  Vec z(d), x(d);
  Eigen::Index col = 0;
  while (true) {
    double w = 1.0;
    for (int a = 0; a < d; ++a) {
      z[a] = rule.nodes()[idx[a]];
      w *= rule.weights()[idx[a]];
    }
    x = st.location;
    x.noalias() += st.scale * z;
    const double log_q = -0.5 * z.squaredNorm() - 0.5 * d * kLog2Pi - log_det_scale;
    const double weight = w * std::exp(log_p(x) - log_q);
    if (weight > 0.0) {
      out.points.col(col++) = x;
      out.weights.push_back(weight);
    }

    int a = 0;
    while (a < d && ++idx[a] == k) idx[a++] = 0;
    if (a == d) break;
  }
  out.points.conservativeResize(d, col);
  return out;
}

void for_each_node(const ModelSpec& model, const Vec& theta, const QuadratureSpec& quad,
                   const std::function<void(const Vec&, double)>& visit) {
  const ExpectationNodes nodes = expectation_nodes(model, theta, quad);
  Vec x(nodes.points.rows());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    x = nodes.points.col(static_cast<Eigen::Index>(i));
    visit(x, nodes.weights[i]);
  }
}

double expect(const ModelSpec& model, const Vec& theta, const std::function<double(const Vec&)>& f,
              const QuadratureSpec& quad) {
  double sum = 0.0;
  for_each_node(model, theta, quad, [&](const Vec& x, double w) {
    const double v = f(x);
    if (!std::isfinite(v)) throw NumericalError("integrand is not finite at sample point " + format_vector(x));
    sum += w * v;
  });
  return sum;
}

}  // namespace weylprior
