#pragma once

#include "weylprior/errors.hpp"
#include "weylprior/linalg.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <type_traits>
#include <vector>

namespace weylprior {

/// Central finite-difference configuration.
///
/// The base step for coordinate i is `step * (|θ^i| + 1)`. If a stencil point
/// leaves the domain the step is halved until it fits; falling below `floor`
/// is an error.
struct DiffSpec {
  double step = 1e-4;
  double floor = 1e-6;
  bool richardson = true;
};

using DomainCheck = std::function<bool(const Vec&)>;

/// Largest admissible step for coordinate i at theta, or throws DomainError.
inline double stencil_step(const Vec& theta, Eigen::Index i, const DiffSpec& diff, const DomainCheck& inside) {
  double h = diff.step * (std::abs(theta[i]) + 1.0);
  if (!inside) return h;
  while (true) {
    Vec plus = theta, minus = theta;
    plus[i] += h;
    minus[i] -= h;
    if (inside(plus) && inside(minus)) return h;
    h *= 0.5;
    if (h < diff.floor)
      throw DomainError("finite-difference stencil for coordinate " + std::to_string(i) +
                        " escapes the domain at " + format_vector(theta));
  }
}

/// ∂f/∂θ^i by central differences, with one Richardson step when enabled.
///
/// F returns a concrete value closed under +, - and scalar *: double, Vec, Mat
/// or Tensor3.
template <class F>
auto central_partial(F&& f, const Vec& theta, Eigen::Index i, const DiffSpec& diff = {},
                     const DomainCheck& inside = {}) {
  using R = std::decay_t<std::invoke_result_t<F&, const Vec&>>;
  const double h = stencil_step(theta, i, diff, inside);
  auto difference = [&](double step) -> R {
    Vec plus = theta, minus = theta;
    plus[i] += step;
    minus[i] -= step;
    R fp = f(plus);
    R fm = f(minus);
    return R((fp - fm) * (1.0 / (2.0 * step)));
  };
  R coarse = difference(h);
  if (!diff.richardson) return coarse;
  R fine = difference(0.5 * h);
  return R((fine * 4.0 - coarse) * (1.0 / 3.0));
}

/// Scalar partial derivative of a parameter function.
inline double partial(const std::function<double(const Vec&)>& f, const Vec& theta, Eigen::Index i,
                      const DiffSpec& diff = {}, const DomainCheck& inside = {}) {
  return central_partial(f, theta, i, diff, inside);
}

/// All m partial derivatives, result[k] = ∂_k f.
template <class F>
auto central_gradient(F&& f, const Vec& theta, const DiffSpec& diff = {}, const DomainCheck& inside = {}) {
  using R = std::decay_t<std::invoke_result_t<F&, const Vec&>>;
  std::vector<R> out;
  out.reserve(static_cast<std::size_t>(theta.size()));
  for (Eigen::Index k = 0; k < theta.size(); ++k) out.push_back(central_partial(f, theta, k, diff, inside));
  return out;
}

}  // namespace weylprior
