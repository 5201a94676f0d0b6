#include "weylprior/geometry.hpp"

#include "weylprior/errors.hpp"

#include <cmath>
#include <sstream>

namespace weylprior {

std::string ConnectionSpec::label() const {
  switch (kind) {
    case ConnectionKind::levi_civita:
      return "levi-civita";
    case ConnectionKind::weyl:
      return "weyl";
    case ConnectionKind::alpha: {
      std::ostringstream os;
      os.precision(17);
      os << "alpha(" << alpha << ")";
      return os.str();
    }
  }
  return "unknown";
}

std::vector<Mat> metric_derivatives(const ModelSpec& model, const Vec& theta, const GeometryOptions& opts) {
  auto metric = [&](const Vec& t) -> Mat { return fisher_metric(model, t, opts.quad).g; };
  return central_gradient(metric, theta, opts.diff, model.domain_check());
}

Tensor3 levi_civita_coefficients(const Mat& g_inv, const std::vector<Mat>& dg) {
  const auto m = g_inv.rows();
  // Christoffel symbols of the first kind, Γ_ljk = ½(∂_j g_lk + ∂_k g_jl − ∂_l g_jk).
  Tensor3 first(m);
  for (Eigen::Index l = 0; l < m; ++l)
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index k = j; k < m; ++k)
        first(l, j, k) = first(l, k, j) =
            0.5 * (dg[static_cast<std::size_t>(j)](l, k) + dg[static_cast<std::size_t>(k)](j, l) -
                   dg[static_cast<std::size_t>(l)](j, k));
  Tensor3 gamma(m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index k = j; k < m; ++k) {
        double v = 0.0;
        for (Eigen::Index l = 0; l < m; ++l) v += g_inv(i, l) * first(l, j, k);
        gamma(i, j, k) = gamma(i, k, j) = v;
      }
  return gamma;
}

Vec weyl_phi(const Mat& g_inv, const Tensor3& C) {
  const auto m = g_inv.rows();
  Vec phi = Vec::Zero(m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index k = 0; k < m; ++k) phi[i] += C(i, j, k) * g_inv(j, k);
  return 0.5 * phi;
}

LocalGeometry local_geometry(const ModelSpec& model, const Vec& theta, const GeometryOptions& opts) {
  const auto info = information_tensors(model, theta, opts.quad);
  LocalGeometry local;
  local.at = theta;
  local.chart = model.chart().name;
  local.g = info.metric.g;
  local.g_inv = inverse_metric(info.metric);
  local.C = info.cubic.C;
  local.dg = metric_derivatives(model, theta, opts);
  local.levi_civita = levi_civita_coefficients(local.g_inv, local.dg);
  local.phi = weyl_phi(local.g_inv, local.C);
  return local;
}

Tensor3 alpha_coefficients(const LocalGeometry& local, double alpha) {
  const auto m = local.g.rows();
  Tensor3 gamma(m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index k = j; k < m; ++k) {
        double raised = 0.0;
        for (Eigen::Index l = 0; l < m; ++l) raised += local.g_inv(i, l) * local.C(l, j, k);
        gamma(i, j, k) = gamma(i, k, j) = local.levi_civita(i, j, k) - 0.5 * alpha * raised;
      }
  return gamma;
}

Tensor3 weyl_coefficients(const LocalGeometry& local) {
  const auto m = local.g.rows();
  const Vec raised_phi = local.g_inv * local.phi;  // g^{im} φ_m
  Tensor3 gamma(m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index k = j; k < m; ++k) {
        const double dij = i == j ? 1.0 : 0.0;
        const double dik = i == k ? 1.0 : 0.0;
        const double extra = 0.5 * (dij * local.phi[k] + dik * local.phi[j] - raised_phi[i] * local.g(j, k));
        gamma(i, j, k) = gamma(i, k, j) = local.levi_civita(i, j, k) + extra;
      }
  return gamma;
}

Tensor3 coefficients(const LocalGeometry& local, const ConnectionSpec& spec) {
  switch (spec.kind) {
    case ConnectionKind::levi_civita:
      return local.levi_civita;
    case ConnectionKind::alpha:
      return alpha_coefficients(local, spec.alpha);
    case ConnectionKind::weyl:
      return weyl_coefficients(local);
  }
  throw ConfigError("unknown connection kind");
}

ConnectionCoefficients connection(const ModelSpec& model, const Vec& theta, const ConnectionSpec& spec,
                                  const GeometryOptions& opts) {
  const auto local = local_geometry(model, theta, opts);
  return ConnectionCoefficients{theta, coefficients(local, spec), spec, local.chart};
}

ConnectionCoefficients levi_civita(const ModelSpec& model, const Vec& theta, const GeometryOptions& opts) {
  return connection(model, theta, ConnectionSpec::levi_civita(), opts);
}

ConnectionCoefficients alpha_connection(const ModelSpec& model, const Vec& theta, double alpha,
                                        const GeometryOptions& opts) {
  return connection(model, theta, ConnectionSpec::alpha_connection(alpha), opts);
}

ConnectionCoefficients weyl_connection(const ModelSpec& model, const Vec& theta, const GeometryOptions& opts) {
  return connection(model, theta, ConnectionSpec::weyl(), opts);
}

OneFormSample weyl_one_form(const ModelSpec& model, const Vec& theta, const GeometryOptions& opts) {
  const auto info = information_tensors(model, theta, opts.quad);
  Vec phi = weyl_phi(inverse_metric(info.metric), info.cubic.C);
  if (!phi.allFinite()) throw NumericalError("Weyl 1-form is not finite at " + format_vector(theta));
  return OneFormSample{theta, std::move(phi), model.chart().name};
}

Mat closedness_residual(const OneFormField& field, const Vec& theta, const DiffSpec& diff, const DomainCheck& inside) {
  const auto d = central_gradient(field, theta, diff, inside);  // d[i][j] = ∂_i φ_j
  const auto m = theta.size();
  Mat r(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      r(i, j) = d[static_cast<std::size_t>(i)][j] - d[static_cast<std::size_t>(j)][i];
  return r;
}

Mat closedness_residual(const ModelSpec& model, const Vec& theta, const GeometryOptions& opts) {
  model.require_interior(theta);
  auto phi = [&](const Vec& t) -> Vec { return weyl_one_form(model, t, opts).phi; };
  return closedness_residual(phi, theta, opts.diff, model.domain_check());
}

namespace {

void require_closed(const ModelSpec& model, const Vec& theta, const GeometryOptions& opts) {
  const double r = max_abs(closedness_residual(model, theta, opts));
  if (!(r <= opts.closedness_tolerance)) {
    std::ostringstream os;
    os.precision(6);
    os << "Weyl 1-form of " << model.id << " is not closed at " << format_vector(theta) << " (max |dφ| = " << r
       << " > " << opts.closedness_tolerance << "); no potential and no parallel prior exists";
    throw ExistenceError(os.str());
  }
}

}  // namespace

PotentialValue potential_omega(const ModelSpec& model, const Vec& theta, const Vec& anchor,
                               const GeometryOptions& opts) {
  model.require_interior(theta);
  model.require_interior(anchor);
  if (theta == anchor) return PotentialValue{theta, anchor, 0.0};

  const auto inside = model.domain_check();
  const Path straight = straight_path(anchor, theta, opts.path_steps);
  const Path stairs = staircase_path(anchor, theta, opts.path_steps);
  const bool straight_ok = path_in_domain(straight, inside);
  const bool stairs_ok = path_in_domain(stairs, inside);
  if (!straight_ok && !stairs_ok)
    throw DomainError("no in-domain path from anchor " + format_vector(anchor) + " to " + format_vector(theta));

  require_closed(model, anchor, opts);
  require_closed(model, theta, opts);
  const Vec mid = 0.5 * (anchor + theta);
  if (straight_ok) require_closed(model, mid, opts);

  auto phi = [&](const Vec& t) -> Vec { return weyl_one_form(model, t, opts).phi; };
  const double omega = line_integral_gauss(phi, straight_ok ? straight : stairs, inside);

  const bool distinct = stairs.waypoints.size() > 2;
  if (opts.spot_check_paths && straight_ok && stairs_ok && distinct) {
    const double other = line_integral_gauss(phi, stairs, inside);
    if (std::abs(other - omega) > opts.path_independence_tolerance * std::max(1.0, std::abs(omega))) {
      std::ostringstream os;
      os.precision(12);
      os << "potential of the Weyl 1-form is path dependent between " << format_vector(anchor) << " and "
         << format_vector(theta) << ": straight " << omega << " vs staircase " << other;
      throw ExistenceError(os.str());
    }
  }
  return PotentialValue{theta, anchor, omega};
}

Mat ricci_tensor(const ModelSpec& model, const Vec& theta, const ConnectionSpec& spec, const GeometryOptions& opts) {
  model.require_interior(theta);
  auto gamma_at = [&](const Vec& t) -> Tensor3 { return coefficients(local_geometry(model, t, opts), spec); };
  const Tensor3 gamma = gamma_at(theta);
  const auto dgamma = central_gradient(gamma_at, theta, opts.diff, model.domain_check());
  const auto m = theta.size();
  Mat ric = Mat::Zero(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index k = 0; k < m; ++k) {
      double v = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        v += dgamma[static_cast<std::size_t>(i)](i, j, k) - dgamma[static_cast<std::size_t>(j)](i, i, k);
        for (Eigen::Index p = 0; p < m; ++p) v += gamma(i, i, p) * gamma(p, j, k) - gamma(i, j, p) * gamma(p, i, k);
      }
      ric(j, k) = v;
    }
  return ric;
}

namespace {

// (∂_k g_ij − Γa^l_ki g_lj − Γb^l_kj g_il)
Tensor3 covariant_metric_derivative(const LocalGeometry& local, const Tensor3& ga, const Tensor3& gb) {
  const auto m = local.g.rows();
  Tensor3 out(m);
  for (Eigen::Index k = 0; k < m; ++k)
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) {
        double v = local.dg[static_cast<std::size_t>(k)](i, j);
        for (Eigen::Index l = 0; l < m; ++l) v -= ga(l, k, i) * local.g(l, j) + gb(l, k, j) * local.g(i, l);
        out(k, i, j) = v;
      }
  return out;
}

}  // namespace

Tensor3 duality_residual(const LocalGeometry& local, double alpha) {
  return covariant_metric_derivative(local, alpha_coefficients(local, alpha), alpha_coefficients(local, -alpha));
}

Tensor3 duality_residual(const ModelSpec& model, const Vec& theta, double alpha, const GeometryOptions& opts) {
  return duality_residual(local_geometry(model, theta, opts), alpha);
}

Tensor3 nabla_g_identity_residual(const LocalGeometry& local, double alpha) {
  const Tensor3 ga = alpha_coefficients(local, alpha);
  return covariant_metric_derivative(local, ga, ga) - alpha * local.C;
}

Tensor3 nabla_g_identity_residual(const ModelSpec& model, const Vec& theta, double alpha,
                                  const GeometryOptions& opts) {
  return nabla_g_identity_residual(local_geometry(model, theta, opts), alpha);
}

Tensor3 weyl_compatibility_residual(const LocalGeometry& local) {
  const Tensor3 gw = weyl_coefficients(local);
  Tensor3 out = covariant_metric_derivative(local, gw, gw);
  const auto m = local.g.rows();
  for (Eigen::Index k = 0; k < m; ++k)
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) out(k, i, j) += local.phi[k] * local.g(i, j);
  return out;
}

Tensor3 weyl_compatibility_residual(const ModelSpec& model, const Vec& theta, const GeometryOptions& opts) {
  return weyl_compatibility_residual(local_geometry(model, theta, opts));
}

Vec connection_trace(const Tensor3& gamma) {
  const auto m = gamma.dim();
  Vec t = Vec::Zero(m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < m; ++i) t[j] += gamma(i, j, i);
  return t;
}

Vec trace_identity_residual(const LocalGeometry& local) {
  const double m = static_cast<double>(local.g.rows());
  return connection_trace(weyl_coefficients(local)) - connection_trace(local.levi_civita) - 0.5 * m * local.phi;
}

Vec trace_identity_residual(const ModelSpec& model, const Vec& theta, const GeometryOptions& opts) {
  return trace_identity_residual(local_geometry(model, theta, opts));
}

double weyl_translate(const ModelSpec& model, const Path& path, const GeometryOptions& opts) {
  auto phi = [&](const Vec& t) -> Vec { return weyl_one_form(model, t, opts).phi; };
  return std::exp(line_integral_gauss(phi, path, model.domain_check()));
}

double gauge_rescale_check(const ModelSpec& model, const ScalarField& lambda, const Path& path,
                           const GeometryOptions& opts, const std::optional<Vec>& tangent) {
  if (path.waypoints.size() < 2) throw ConfigError("a path needs at least two waypoints");
  const auto inside = model.domain_check();
  const Vec& p = path.waypoints.front();
  const Vec& q = path.waypoints.back();
  const Vec v = tangent.value_or(Vec::Ones(model.manifold_dim));

  auto phi = [&](const Vec& t) -> Vec { return weyl_one_form(model, t, opts).phi; };
  auto phi_rescaled = [&](const Vec& t) -> Vec {
    Vec dl(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) dl[i] = central_partial(lambda, t, i, opts.diff, inside);
    return phi(t) - dl;
  };
  auto length = [&](const Vec& t) {
    const Mat g = fisher_metric(model, t, opts.quad).g;
    return v.dot(g * v);
  };

  // Both branches start from the scalar product g_p.
  const double initial = length(p);
  const double base = initial / length(p) * std::exp(line_integral_gauss(phi, path, inside)) * length(q);

  const double lp = std::exp(lambda(p)) * length(p);
  const double lq = std::exp(lambda(q)) * length(q);
  const double rescaled = initial / lp * std::exp(line_integral_gauss(phi_rescaled, path, inside)) * lq;

  return std::abs(rescaled - base) / std::abs(base);
}

}  // namespace weylprior
