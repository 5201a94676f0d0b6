#include "weylprior/models.hpp"

#include "weylprior/errors.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace weylprior {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2π)

Chart identity_chart(std::string name, std::vector<std::string> coords, std::function<bool(const Vec&, double)> domain) {
  const auto m = static_cast<Eigen::Index>(coords.size());
  Chart c;
  c.name = std::move(name);
  c.coordinates = std::move(coords);
  c.domain = std::move(domain);
  c.to_reference = [](const Vec& t) { return t; };
  c.from_reference = [](const Vec& t) { return t; };
  c.reference_jacobian = [m](const Vec&) { return Mat::Identity(m, m); };
  return c;
}

bool finite(const Vec& v) { return v.allFinite(); }

// ---------------------------------------------------------------- gaussian1d

ModelSpec make_gaussian1d() {
  ModelSpec model;
  model.id = "gaussian1d";
  model.manifold_dim = 2;

  model.charts.push_back(identity_chart("mu_s2", {"mu", "s2"}, [](const Vec& t, double eps) {
    return t.size() == 2 && finite(t) && t[1] > eps;
  }));

  Chart sd;
  sd.name = "mu_sigma";
  sd.coordinates = {"mu", "sigma"};
  sd.domain = [](const Vec& t, double eps) { return t.size() == 2 && finite(t) && t[1] > eps; };
  sd.to_reference = [](const Vec& t) { return Vec{{t[0], t[1] * t[1]}}; };
  sd.from_reference = [](const Vec& r) { return Vec{{r[0], std::sqrt(r[1])}}; };
  sd.reference_jacobian = [](const Vec& t) {
    Mat j = Mat::Zero(2, 2);
    j(0, 0) = 1.0;
    j(1, 1) = 2.0 * t[1];
    return j;
  };
  model.charts.push_back(std::move(sd));

  // η1 = μ/σ², η2 = -1/(2σ²)
  Chart nat;
  nat.name = "natural";
  nat.coordinates = {"eta1", "eta2"};
  nat.domain = [](const Vec& t, double eps) { return t.size() == 2 && finite(t) && t[1] < -eps; };
  nat.to_reference = [](const Vec& t) {
    const double s2 = -0.5 / t[1];
    return Vec{{t[0] * s2, s2}};
  };
  nat.from_reference = [](const Vec& r) { return Vec{{r[0] / r[1], -0.5 / r[1]}}; };
  nat.reference_jacobian = [](const Vec& t) {
    const double e1 = t[0], e2 = t[1];
    Mat j(2, 2);
    j << -0.5 / e2, 0.5 * e1 / (e2 * e2), 0.0, 0.5 / (e2 * e2);
    return j;
  };
  model.charts.push_back(std::move(nat));

  model.sample_space.kind = SampleKind::continuous;
  model.sample_space.dimension = 1;
  model.sample_space.standardize = [](const Vec& r) {
    return Standardization{Vec::Constant(1, r[0]), Mat::Constant(1, 1, std::sqrt(r[1]))};
  };

  model.log_density_ref = [](const Vec& x, const Vec& r) {
    const double d = x[0] - r[0];
    return -0.5 * kLog2Pi - 0.5 * std::log(r[1]) - d * d / (2.0 * r[1]);
  };
  model.analytic_score = [](const Vec& x, const Vec& r) {
    const double d = x[0] - r[0];
    const double s2 = r[1];
    return Vec{{d / s2, d * d / (2.0 * s2 * s2) - 1.0 / (2.0 * s2)}};
  };
  model.bind_log_density = [](const Vec& r) -> BoundLogDensity {
    const double mu = r[0], s2 = r[1], constant = -0.5 * kLog2Pi - 0.5 * std::log(r[1]);
    return [=](const Vec& x) {
      const double d = x[0] - mu;
      return constant - d * d / (2.0 * s2);
    };
  };
  model.bind_score = [](const Vec& r) -> BoundScore {
    const double mu = r[0], s2 = r[1];
    return [=](const Vec& x, Vec& s) {
      const double d = x[0] - mu;
      s.resize(2);
      s[0] = d / s2;
      s[1] = d * d / (2.0 * s2 * s2) - 1.0 / (2.0 * s2);
    };
  };
  model.log_partition = LogPartition{"natural", [](const Vec& e) {
                                       return -e[0] * e[0] / (4.0 * e[1]) - 0.5 * std::log(-2.0 * e[1]);
                                     }};
  model.default_anchor = Vec{{0.0, 1.0}};
  return model;
}

// --------------------------------------------------------------- gaussian_mv

struct MvParams {
  Vec mu;
  Mat sigma;
};

MvParams split_mv(const Vec& r, int n) {
  return {r.head(n), unvech(r.tail(vech_size(n)), n)};
}

ModelSpec make_gaussian_mv(int n) {
  if (n < 1) throw ConfigError("gaussian_mv requires data dimension n >= 1, got " + std::to_string(n));
  ModelSpec model;
  model.id = "gaussian_mv:" + std::to_string(n);
  model.manifold_dim = n + vech_size(n);

  std::vector<std::string> coords;
  for (int i = 1; i <= n; ++i) coords.push_back("mu" + std::to_string(i));
  for (int i = 1; i <= n; ++i)
    for (int j = i; j <= n; ++j) coords.push_back("s" + std::to_string(i) + std::to_string(j));

  const int m = model.manifold_dim;
  model.charts.push_back(identity_chart("mu_vech", coords, [n, m](const Vec& t, double eps) {
    if (t.size() != m || !finite(t)) return false;
    const Mat shifted = unvech(t.tail(vech_size(n)), n) - eps * Mat::Identity(n, n);
    return Eigen::LLT<Mat>(shifted).info() == Eigen::Success;
  }));

  model.sample_space.kind = SampleKind::continuous;
  model.sample_space.dimension = n;
  model.sample_space.standardize = [n](const Vec& r) {
    const auto p = split_mv(r, n);
    Eigen::LLT<Mat> llt(p.sigma);
    if (llt.info() != Eigen::Success) throw NumericalError("covariance is not positive-definite");
    return Standardization{p.mu, llt.matrixL()};
  };

  model.log_density_ref = [n](const Vec& x, const Vec& r) {
    const auto p = split_mv(r, n);
    Eigen::LLT<Mat> llt(p.sigma);
    if (llt.info() != Eigen::Success) throw DomainError("covariance is not positive-definite");
    const Vec z = llt.matrixL().solve(x - p.mu);
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return -0.5 * n * kLog2Pi - 0.5 * log_det - 0.5 * z.squaredNorm();
  };
  model.bind_log_density = [n](const Vec& r) -> BoundLogDensity {
    const auto p = split_mv(r, n);
    const Eigen::LLT<Mat> llt(p.sigma);
    if (llt.info() != Eigen::Success) throw DomainError("covariance is not positive-definite");
    const Mat l_inv = llt.matrixL().solve(Mat::Identity(n, n));
    const double constant = -0.5 * n * kLog2Pi - llt.matrixLLT().diagonal().array().log().sum();
    return [mu = p.mu, l_inv, constant, z = Vec(n)](const Vec& x) mutable {
      z.noalias() = l_inv * (x - mu);
      return constant - 0.5 * z.squaredNorm();
    };
  };
  // ∂l/∂μ = Σ⁻¹r; with G = ½(Σ⁻¹rrᵀΣ⁻¹ − Σ⁻¹), ∂l/∂σ_aa = G_aa and ∂l/∂σ_ab = 2G_ab.
  model.analytic_score = [n, m](const Vec& x, const Vec& r) {
    const auto p = split_mv(r, n);
    Eigen::LLT<Mat> llt(p.sigma);
    const Mat inv = llt.solve(Mat::Identity(n, n));
    const Vec u = inv * (x - p.mu);
    const Mat g = 0.5 * (u * u.transpose() - inv);
    Vec s(m);
    s.head(n) = u;
    int k = n;
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) s[k++] = (a == b ? 1.0 : 2.0) * g(a, b);
    return s;
  };
  model.bind_score = [n, m](const Vec& r) -> BoundScore {
    const auto p = split_mv(r, n);
    const Eigen::LLT<Mat> llt(p.sigma);
    if (llt.info() != Eigen::Success) throw DomainError("covariance is not positive-definite");
    const Mat inv = llt.solve(Mat::Identity(n, n));
    return [mu = p.mu, inv, n, m, u = Vec(n)](const Vec& x, Vec& s) mutable {
      u.noalias() = inv * (x - mu);
      s.resize(m);
      s.head(n) = u;
      int k = n;
      for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) s[k++] = (a == b ? 0.5 : 1.0) * (u[a] * u[b] - inv(a, b));
    };
  };

  Vec anchor = Vec::Zero(m);
  anchor.tail(vech_size(n)) = vech(Mat::Identity(n, n));
  model.default_anchor = anchor;
  return model;
}

// ----------------------------------------------------------------- bernoulli

double log_sigmoid_complement(double eta) { return -std::log1p(std::exp(eta)); }

ModelSpec make_bernoulli() {
  ModelSpec model;
  model.id = "bernoulli";
  model.manifold_dim = 1;
  model.charts.push_back(identity_chart("p", {"p"}, [](const Vec& t, double eps) {
    return t.size() == 1 && finite(t) && t[0] > eps && t[0] < 1.0 - eps;
  }));

  Chart nat;
  nat.name = "natural";
  nat.coordinates = {"eta"};
  nat.domain = [](const Vec& t, double) { return t.size() == 1 && finite(t); };
  nat.to_reference = [](const Vec& t) { return Vec::Constant(1, 1.0 / (1.0 + std::exp(-t[0]))); };
  nat.from_reference = [](const Vec& r) { return Vec::Constant(1, std::log(r[0] / (1.0 - r[0]))); };
  nat.reference_jacobian = [](const Vec& t) {
    const double p = 1.0 / (1.0 + std::exp(-t[0]));
    return Mat::Constant(1, 1, p * (1.0 - p));
  };
  model.charts.push_back(std::move(nat));

  model.sample_space.kind = SampleKind::discrete;
  model.sample_space.dimension = 1;
  model.sample_space.support = [](const Vec&, double) { return std::vector<double>{0.0, 1.0}; };

  model.log_density_ref = [](const Vec& x, const Vec& r) {
    if (x[0] == 1.0) return std::log(r[0]);
    if (x[0] == 0.0) return std::log1p(-r[0]);
    return -std::numeric_limits<double>::infinity();
  };
  model.analytic_score = [](const Vec& x, const Vec& r) {
    const double p = r[0];
    return Vec::Constant(1, (x[0] - p) / (p * (1.0 - p)));
  };
  model.log_partition = LogPartition{"natural", [](const Vec& e) { return -log_sigmoid_complement(e[0]); }};
  model.default_anchor = Vec::Constant(1, 0.5);
  return model;
}

// ------------------------------------------------------------------- poisson

bool is_count(double x) { return x >= 0.0 && std::isfinite(x) && x == std::floor(x); }

double poisson_log_pmf(double k, double lambda) { return k * std::log(lambda) - lambda - std::lgamma(k + 1.0); }

ModelSpec make_poisson() {
  ModelSpec model;
  model.id = "poisson";
  model.manifold_dim = 1;
  model.charts.push_back(identity_chart("lambda", {"lambda"}, [](const Vec& t, double eps) {
    return t.size() == 1 && finite(t) && t[0] > eps;
  }));

  Chart nat;
  nat.name = "natural";
  nat.coordinates = {"eta"};
  nat.domain = [](const Vec& t, double) { return t.size() == 1 && finite(t); };
  nat.to_reference = [](const Vec& t) { return Vec::Constant(1, std::exp(t[0])); };
  nat.from_reference = [](const Vec& r) { return Vec::Constant(1, std::log(r[0])); };
  nat.reference_jacobian = [](const Vec& t) { return Mat::Constant(1, 1, std::exp(t[0])); };
  model.charts.push_back(std::move(nat));

  model.sample_space.kind = SampleKind::discrete;
  model.sample_space.dimension = 1;
  // Smallest N >= λ whose omitted mass, weighted by the cubed score scale
  // (1 + (N+1)/λ)³, is below tail; P(X > N) <= pmf(N+1) / (1 - λ/(N+2)).
  model.sample_space.support = [](const Vec& r, double tail) {
    const double lambda = r[0];
    double n = std::floor(lambda);
    while (true) {
      const double mass = std::exp(poisson_log_pmf(n + 1.0, lambda)) / (1.0 - lambda / (n + 2.0));
      if (mass * std::pow(1.0 + (n + 1.0) / lambda, 3) < tail) break;
      n += 1.0;
    }
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(n) + 1);
    for (double k = 0.0; k <= n; k += 1.0) pts.push_back(k);
    return pts;
  };

  model.log_density_ref = [](const Vec& x, const Vec& r) {
    if (!is_count(x[0])) return -std::numeric_limits<double>::infinity();
    return poisson_log_pmf(x[0], r[0]);
  };
  model.analytic_score = [](const Vec& x, const Vec& r) { return Vec::Constant(1, x[0] / r[0] - 1.0); };
  model.log_partition = LogPartition{"natural", [](const Vec& e) { return std::exp(e[0]); }};
  model.default_anchor = Vec::Constant(1, 1.0);
  return model;
}

}  // namespace

bool Chart::contains(const Vec& theta, double margin) const { return domain(theta, margin); }

std::optional<int> Chart::coordinate_index(std::string_view n) const {
  for (std::size_t i = 0; i < coordinates.size(); ++i)
    if (coordinates[i] == n) return static_cast<int>(i);
  return std::nullopt;
}

const Chart& ModelSpec::find_chart(std::string_view name) const {
  for (const auto& c : charts)
    if (c.name == name) return c;
  std::string known;
  for (const auto& c : charts) known += (known.empty() ? "" : ", ") + c.name;
  throw ConfigError("model " + id + " has no chart '" + std::string(name) + "' (charts: " + known + ")");
}

ModelSpec ModelSpec::with_chart(std::string_view name) const {
  const Chart& c = find_chart(name);
  ModelSpec out = *this;
  out.active_chart = static_cast<std::size_t>(&c - charts.data());
  return out;
}

bool ModelSpec::contains(const Vec& theta, double margin) const { return chart().contains(theta, margin); }

void ModelSpec::require_interior(const Vec& theta, double margin) const {
  if (!contains(theta, margin))
    throw DomainError("theta " + format_vector(theta) + " is outside the domain of chart " + chart().name +
                      " of model " + id);
}

DomainCheck ModelSpec::domain_check(double margin) const {
  const Chart c = chart();
  return [c, margin](const Vec& t) { return c.contains(t, margin); };
}

ModelSpec get_model(std::string_view id, const ModelConfig& config) {
  if (id == "gaussian1d") return make_gaussian1d();
  if (id == "gaussian_mv") return make_gaussian_mv(config.n);
  if (id == "bernoulli") return make_bernoulli();
  if (id == "poisson") return make_poisson();
  throw ConfigError("unknown model id '" + std::string(id) + "'");
}

ModelSpec parse_model(std::string_view selector) {
  const auto colon = selector.find(':');
  const auto id = selector.substr(0, colon);
  if (colon == std::string_view::npos) {
    if (id == "gaussian_mv") throw ConfigError("gaussian_mv needs a data dimension, e.g. gaussian_mv:2");
    return get_model(id);
  }
  if (id != "gaussian_mv") throw ConfigError("model '" + std::string(id) + "' takes no parameter");
  const auto arg = selector.substr(colon + 1);
  int n = 0;
  const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), n);
  if (ec != std::errc{} || ptr != arg.data() + arg.size())
    throw ConfigError("bad gaussian_mv dimension '" + std::string(arg) + "'");
  return get_model(id, ModelConfig{n});
}

double log_density(const ModelSpec& model, const Vec& x, const Vec& theta) {
  model.require_interior(theta);
  if (x.size() != model.sample_space.dimension)
    throw DomainError("sample point has dimension " + std::to_string(x.size()) + ", model " + model.id +
                      " expects " + std::to_string(model.sample_space.dimension));
  return model.log_density_ref(x, model.to_reference(theta));
}

BoundLogDensity ModelSpec::log_density_at(const Vec& theta_ref) const {
  if (bind_log_density) return bind_log_density(theta_ref);
  return [f = log_density_ref, theta_ref](const Vec& x) { return f(x, theta_ref); };
}

ScoreAt::ScoreAt(const ModelSpec& model, const Vec& theta, const DiffSpec& diff)
    : model_(&model), theta_(theta), diff_(diff) {
  model.require_interior(theta);
  theta_ref_ = model.to_reference(theta);
  if (!model.analytic_score) return;
  identity_jacobian_ = model.active_chart == 0;
  if (!identity_jacobian_) jacobian_t_ = model.chart().reference_jacobian(theta).transpose();
  if (model.bind_score) bound_ = model.bind_score(theta_ref_);
}

Vec ScoreAt::operator()(const Vec& x) const {
  Vec s;
  into(x, s);
  return s;
}

void ScoreAt::into(const Vec& x, Vec& out) const {
  if (!model_->analytic_score) {
    out = fd_score(x);
    return;
  }
  if (identity_jacobian_) {
    if (bound_)
      bound_(x, out);
    else
      out = (*model_->analytic_score)(x, theta_ref_);
    return;
  }
  Vec ref;
  if (bound_)
    bound_(x, ref);
  else
    ref = (*model_->analytic_score)(x, theta_ref_);
  out.noalias() = jacobian_t_ * ref;
}

Vec ScoreAt::fd_score(const Vec& x) const {
  const ModelSpec& model = *model_;
  auto l = [&](const Vec& t) { return model.log_density_ref(x, model.to_reference(t)); };
  Vec s(theta_.size());
  const auto inside = model.domain_check();
  for (Eigen::Index i = 0; i < theta_.size(); ++i) s[i] = central_partial(l, theta_, i, diff_, inside);
  return s;
}

Vec score(const ModelSpec& model, const Vec& x, const Vec& theta, const DiffSpec& diff) {
  return ScoreAt(model, theta, diff)(x);
}

int vech_size(int n) { return n * (n + 1) / 2; }

Vec vech(const Mat& sym) {
  const auto n = sym.rows();
  Vec v(n * (n + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a; b < n; ++b) v[k++] = sym(a, b);
  return v;
}

Mat unvech(const Eigen::Ref<const Vec>& v, int n) {
  Mat s(n, n);
  Eigen::Index k = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      s(a, b) = v[k];
      s(b, a) = v[k];
      ++k;
    }
  return s;
}

}  // namespace weylprior
