#pragma once

#include "weylprior/linalg.hpp"
#include "weylprior/models.hpp"
#include "weylprior/numerics/quadrature.hpp"

#include <string>

namespace weylprior {

/// Fisher metric g_ij = E_θ[∂_i l ∂_j l] at one point.
struct MetricTensor {
  Vec at;
  Mat g;
  std::string chart;
};

/// Amari–Chentsov tensor C_ijk = E_θ[∂_i l ∂_j l ∂_k l] at one point.
struct CubicTensor {
  Vec at;
  Tensor3 C;
  std::string chart;
};

struct InformationTensors {
  MetricTensor metric;
  CubicTensor cubic;
};

/// Raw quadrature output whose asymmetry exceeds this (relative to the largest
/// entry) is reported as a NumericalError before symmetrization.
inline constexpr double kSymmetryTolerance = 1e-10;

MetricTensor fisher_metric(const ModelSpec& model, const Vec& theta, const QuadratureSpec& quad = {});
CubicTensor amari_chentsov(const ModelSpec& model, const Vec& theta, const QuadratureSpec& quad = {});

/// g and C from a single sweep over the quadrature nodes.
InformationTensors information_tensors(const ModelSpec& model, const Vec& theta, const QuadratureSpec& quad = {});

/// g^{-1}; throws NumericalError when g is not SPD.
Mat inverse_metric(const MetricTensor& g);

/// √det g from the Cholesky factor; throws NumericalError when g is not SPD.
double sqrt_det_metric(const MetricTensor& g);

}  // namespace weylprior
