#pragma once

#include "weylprior/linalg.hpp"
#include "weylprior/models.hpp"
#include "weylprior/numerics.hpp"
#include "weylprior/tensors.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace weylprior {

enum class ConnectionKind { levi_civita, alpha, weyl };

struct ConnectionSpec {
  ConnectionKind kind = ConnectionKind::levi_civita;
  double alpha = 0.0;  // used by ConnectionKind::alpha only

  static ConnectionSpec levi_civita() { return {}; }
  static ConnectionSpec alpha_connection(double a) { return {ConnectionKind::alpha, a}; }
  static ConnectionSpec weyl() { return {ConnectionKind::weyl, 0.0}; }
  std::string label() const;
};

/// Christoffel symbols Γ^i_{jk} stored as gamma(i, j, k); symmetric in (j, k).
struct ConnectionCoefficients {
  Vec at;
  Tensor3 gamma;
  ConnectionSpec kind;
  std::string chart;
};

/// Weyl 1-form φ_i = ½ C_ijk g^{jk} at one point.
struct OneFormSample {
  Vec at;
  Vec phi;
  std::string chart;
};

/// Ω(θ) = ∫ φ along a path from the anchor, so Ω(anchor) = 0.
struct PotentialValue {
  Vec at;
  Vec anchor;
  double omega = 0.0;
};

struct GeometryOptions {
  QuadratureSpec quad;
  DiffSpec diff;
  int path_steps = 256;
  /// Max |∂_i φ_j − ∂_j φ_i| accepted before Ω is declared undefined.
  double closedness_tolerance = 1e-6;
  /// Allowed |Ω_straight − Ω_staircase| / max(1, |Ω|) in the spot check.
  double path_independence_tolerance = 1e-6;
  bool spot_check_paths = true;
};

/// Pointwise ingredients shared by every connection formula.
struct LocalGeometry {
  Vec at;
  std::string chart;
  Mat g;
  Mat g_inv;
  Tensor3 C;
  std::vector<Mat> dg;  // dg[k](i, j) = ∂_k g_ij
  Tensor3 levi_civita;
  Vec phi;
};

LocalGeometry local_geometry(const ModelSpec& model, const Vec& theta, const GeometryOptions& opts = {});

/// ∂_k g by central differences over fresh quadrature evaluations of g.
std::vector<Mat> metric_derivatives(const ModelSpec& model, const Vec& theta, const GeometryOptions& opts = {});

// Coefficient formulas on precomputed pointwise data.
Tensor3 levi_civita_coefficients(const Mat& g_inv, const std::vector<Mat>& dg);
Tensor3 alpha_coefficients(const LocalGeometry& local, double alpha);
Tensor3 weyl_coefficients(const LocalGeometry& local);
Tensor3 coefficients(const LocalGeometry& local, const ConnectionSpec& spec);
Vec weyl_phi(const Mat& g_inv, const Tensor3& C);

ConnectionCoefficients levi_civita(const ModelSpec& model, const Vec& theta, const GeometryOptions& opts = {});
ConnectionCoefficients alpha_connection(const ModelSpec& model, const Vec& theta, double alpha,
                                        const GeometryOptions& opts = {});
ConnectionCoefficients weyl_connection(const ModelSpec& model, const Vec& theta, const GeometryOptions& opts = {});
ConnectionCoefficients connection(const ModelSpec& model, const Vec& theta, const ConnectionSpec& spec,
                                  const GeometryOptions& opts = {});

OneFormSample weyl_one_form(const ModelSpec& model, const Vec& theta, const GeometryOptions& opts = {});

/// R_ij = ∂_i φ_j − ∂_j φ_i for the model's Weyl 1-form.
Mat closedness_residual(const ModelSpec& model, const Vec& theta, const GeometryOptions& opts = {});
/// Same for an arbitrary 1-form field.
Mat closedness_residual(const OneFormField& field, const Vec& theta, const DiffSpec& diff = {},
                        const DomainCheck& inside = {});

/// Potential of φ. Integrates along the straight segment anchor → θ, falling back
/// to the axis-aligned staircase when the segment leaves the domain. Throws
/// ExistenceError if φ fails the closedness test at the endpoints or if the two
/// paths disagree.
PotentialValue potential_omega(const ModelSpec& model, const Vec& theta, const Vec& anchor,
                               const GeometryOptions& opts = {});

/// Ric_jk = ∂_i Γ^i_jk − ∂_j Γ^i_ik + Γ^i_ip Γ^p_jk − Γ^i_jp Γ^p_ik, with ∂Γ
/// by central differences of freshly computed connections.
Mat ricci_tensor(const ModelSpec& model, const Vec& theta, const ConnectionSpec& spec,
                 const GeometryOptions& opts = {});

/// D_kij = ∂_k g_ij − (^αΓ^l_ki g_lj + ^{−α}Γ^l_kj g_il).
Tensor3 duality_residual(const ModelSpec& model, const Vec& theta, double alpha, const GeometryOptions& opts = {});
Tensor3 duality_residual(const LocalGeometry& local, double alpha);

/// E_kij = (^α∇_k g)_ij − α C_kij.
Tensor3 nabla_g_identity_residual(const ModelSpec& model, const Vec& theta, double alpha,
                                  const GeometryOptions& opts = {});
Tensor3 nabla_g_identity_residual(const LocalGeometry& local, double alpha);

/// W_kij = (^W∇_k g)_ij + φ_k g_ij.
Tensor3 weyl_compatibility_residual(const ModelSpec& model, const Vec& theta, const GeometryOptions& opts = {});
Tensor3 weyl_compatibility_residual(const LocalGeometry& local);

/// Contracted coefficients Σ_i Γ^i_{ji}.
Vec connection_trace(const Tensor3& gamma);

/// Σ_i ^WΓ^i_ji − Σ_i ^{LC}Γ^i_ji − (m/2) φ_j.
Vec trace_identity_residual(const ModelSpec& model, const Vec& theta, const GeometryOptions& opts = {});
Vec trace_identity_residual(const LocalGeometry& local);

/// Scale factor exp(∫_c φ) carrying g_q to the Weyl-translated scalar product.
double weyl_translate(const ModelSpec& model, const Path& path, const GeometryOptions& opts = {});

using ScalarField = std::function<double(const Vec&)>;

/// Weyl-translates the squared length of `tangent` along `path` twice, with
/// (g, φ) and with the rescaled pair (e^λ g, φ − dλ), from the same initial
/// scalar product, and returns the relative difference of the results.
/// `tangent` defaults to (1, ..., 1).
double gauge_rescale_check(const ModelSpec& model, const ScalarField& lambda, const Path& path,
                           const GeometryOptions& opts = {}, const std::optional<Vec>& tangent = std::nullopt);

}  // namespace weylprior
