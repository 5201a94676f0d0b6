#include "weylprior/tensors.hpp"

#include "weylprior/errors.hpp"

#include <cmath>

namespace weylprior {

namespace {

Eigen::LLT<Mat> factor(const MetricTensor& g) {
  Eigen::LLT<Mat> llt(g.g);
  if (llt.info() != Eigen::Success || !g.g.allFinite())
    throw NumericalError("Fisher metric is not positive-definite at " + format_vector(g.at) + " (chart " +
                         g.chart + ")");
  return llt;
}

void check_metric(const MetricTensor& m) { factor(m); }

InformationTensors sweep(const ModelSpec& model, const Vec& theta, const QuadratureSpec& quad, bool want_cubic) {
  const auto m = static_cast<Eigen::Index>(model.manifold_dim);
  const ScoreAt score_at(model, theta);
  Mat g = Mat::Zero(m, m);
  Tensor3 c(want_cubic ? m : 0);
  const ExpectationNodes nodes = expectation_nodes(model, theta, quad);
  Vec x(nodes.points.rows()), s(m);
  double* cd = want_cubic ? c.raw() : nullptr;
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    x = nodes.points.col(static_cast<Eigen::Index>(n));
    score_at.into(x, s);
    const double w = nodes.weights[n];
    for (Eigen::Index i = 0; i < m; ++i) {
      const double wi = w * s[i];
      for (Eigen::Index j = 0; j < m; ++j) {
        const double wij = wi * s[j];
        g(i, j) += wij;
        if (!cd) continue;
        double* row = cd + (i * m + j) * m;
        for (Eigen::Index k = 0; k < m; ++k) row[k] += wij * s[k];
      }
    }
  }

  if (!g.allFinite()) throw NumericalError("non-finite Fisher metric at " + format_vector(theta));
  const double scale = std::max(1.0, max_abs(g));
  if (max_abs(Mat(g - g.transpose())) > kSymmetryTolerance * scale)
    throw NumericalError("raw Fisher metric is asymmetric at " + format_vector(theta));

  InformationTensors out;
  out.metric = MetricTensor{theta, 0.5 * (g + g.transpose()), model.chart().name};
  check_metric(out.metric);
  if (want_cubic) {
    for (double v : c.data())
      if (!std::isfinite(v)) throw NumericalError("non-finite Amari-Chentsov tensor at " + format_vector(theta));
    const double cscale = std::max(1.0, c.max_abs());
    if (permutation_asymmetry(c) > kSymmetryTolerance * cscale)
      throw NumericalError("raw Amari-Chentsov tensor is asymmetric at " + format_vector(theta));
    out.cubic = CubicTensor{theta, symmetrized(c), model.chart().name};
  }
  return out;
}

}  // namespace

MetricTensor fisher_metric(const ModelSpec& model, const Vec& theta, const QuadratureSpec& quad) {
  return sweep(model, theta, quad, false).metric;
}

CubicTensor amari_chentsov(const ModelSpec& model, const Vec& theta, const QuadratureSpec& quad) {
  return sweep(model, theta, quad, true).cubic;
}

InformationTensors information_tensors(const ModelSpec& model, const Vec& theta, const QuadratureSpec& quad) {
  return sweep(model, theta, quad, true);
}

Mat inverse_metric(const MetricTensor& g) {
  const Mat inv = factor(g).solve(Mat::Identity(g.g.rows(), g.g.cols()));
  return 0.5 * (inv + inv.transpose());
}

double sqrt_det_metric(const MetricTensor& g) {
  return factor(g).matrixLLT().diagonal().prod();
}

}  // namespace weylprior
