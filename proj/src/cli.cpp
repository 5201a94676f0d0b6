#include "weylprior/cli.hpp"

#include "weylprior/bayes.hpp"
#include "weylprior/geometry.hpp"
#include "weylprior/models.hpp"
#include "weylprior/priors.hpp"
#include "weylprior/tensors.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

namespace weylprior::cli {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- parsing

double parse_number(const std::string& text, const std::string& what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
    throw UsageError("bad number '" + text + "' in " + what);
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_number(item, what));
  if (out.empty()) throw UsageError(what + " is empty");
  return out;
}

Subcommand parse_subcommand(const std::string& name) {
  if (name == "tensor") return Subcommand::tensor;
  if (name == "check") return Subcommand::check;
  if (name == "prior") return Subcommand::prior;
  if (name == "posterior") return Subcommand::posterior;
  return Subcommand::verify_all;
}

const std::vector<std::string> kChecks = {"closedness", "duality", "weyl-compat", "ricci-symmetry", "gauge",
                                          "trace-identity", "nabla-g", "weyl-alpha-trace"};

// ---------------------------------------------------------------- model defaults

Vec reference_probe(const ModelSpec& model) {
  if (model.id == "gaussian1d") return from_std({0.5, 2.0});
  if (model.id == "bernoulli") return from_std({0.3});
  if (model.id == "poisson") return from_std({2.5});
  const int n = model.sample_space.dimension;
  Mat sigma = Mat::Identity(n, n);
  const double diag[] = {1.5, 0.8, 1.2, 1.0};
  const double off = n == 2 ? 0.3 : 0.1 / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sigma(i, j) = i == j ? diag[i % 4] : off;
  Vec theta(model.manifold_dim);
  for (int i = 0; i < n; ++i) theta[i] = n == 2 ? (i == 0 ? 0.2 : -0.1) : 0.1 * (i + 1);
  theta.tail(vech_size(n)) = vech(sigma);
  return theta;
}

std::vector<Vec> reference_test_points(const ModelSpec& model) {
  if (model.id == "gaussian1d") return {from_std({0.5, 2.0}), from_std({-1.0, 0.5}), from_std({1.5, 8.0})};
  if (model.id == "bernoulli") return {from_std({0.2}), from_std({0.5}), from_std({0.7})};
  if (model.id == "poisson") return {from_std({0.5}), from_std({2.5}), from_std({10.0})};
  const int n = model.sample_space.dimension;
  Mat sigma = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) sigma(i, i) = i % 2 == 0 ? 2.0 : 0.5;
  Vec second = Vec::Zero(model.manifold_dim);
  second.tail(vech_size(n)) = vech(sigma);
  return {reference_probe(model), second};
}

std::string reference_grid(const ModelSpec& model) {
  if (model.id == "gaussian1d") return "mu=-2:2:21,s2=0.25:16:21:log";
  if (model.id == "bernoulli") return "p=0.05:0.95:19";
  if (model.id == "poisson") return "lambda=0.25:16:21:log";
  const int n = model.sample_space.dimension;
  std::string grid;
  const auto& coords = model.reference_chart().coordinates;
  for (int i = 0; i < n; ++i) grid += coords[i] + "=0,";
  for (std::size_t k = n; k < coords.size(); ++k) {
    const std::string& c = coords[k];
    const bool diagonal = c.size() >= 3 && c[1] == c[2];
    grid += diagonal ? c + "=0.5:4:3:log" : c + "=0";
    if (k + 1 < coords.size()) grid += ',';
  }
  return grid;
}

// ---------------------------------------------------------------- json helpers

json to_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json to_json(const Mat& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

json to_json(const Tensor3& t) {
  json out = json::array();
  for (int i = 0; i < t.dim(); ++i) {
    json plane = json::array();
    for (int j = 0; j < t.dim(); ++j) {
      json row = json::array();
      for (int k = 0; k < t.dim(); ++k) row.push_back(t(i, j, k));
      plane.push_back(row);
    }
    out.push_back(plane);
  }
  return out;
}

json diagnostic(const std::string& check, const std::optional<Vec>& theta, double residual, double tolerance) {
  json d;
  d["check"] = check;
  d["theta"] = theta ? to_json(*theta) : json(nullptr);
  d["max_residual"] = std::isfinite(residual) ? json(residual) : json(nullptr);
  d["tolerance"] = tolerance;
  d["pass"] = std::isfinite(residual) && residual <= tolerance;
  return d;
}

// ---------------------------------------------------------------- output

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw Error("cannot open output file '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& stream() { return *stream_; }
  void finish() {
    stream_->flush();
    if (!*stream_) throw Error("failed to write output");
  }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

void emit_json(const RunConfig& config, std::ostream& out, const json& doc) {
  Output o(config.out, out);
  o.stream() << doc.dump(2) << '\n';
  o.finish();
}

// ---------------------------------------------------------------- shared setup

struct Context {
  ModelSpec model;
  Vec theta;
  Vec anchor;
};

Context make_context(const RunConfig& config) {
  Context ctx{parse_model(config.model), {}, {}};
  if (!config.chart.empty()) ctx.model = ctx.model.with_chart(config.chart);
  const int m = ctx.model.manifold_dim;
  auto vec_arg = [&](const std::optional<std::vector<double>>& v, const char* flag, const Vec& fallback) {
    if (!v) return fallback;
    if (static_cast<int>(v->size()) != m)
      throw UsageError(std::string(flag) + " needs " + std::to_string(m) + " values for model " + ctx.model.id +
                       ", got " + std::to_string(v->size()));
    return from_std(*v);
  };
  ctx.theta = vec_arg(config.theta, "--theta", ctx.model.from_reference(reference_probe(ctx.model)));
  ctx.anchor = vec_arg(config.anchor, "--anchor", ctx.model.anchor());
  return ctx;
}

Path parse_path(const std::string& text, const ModelSpec& model, int steps) {
  Path path{{}, steps};
  for (const auto& wp : split(text, ';')) {
    const auto v = parse_list(wp, "--path");
    if (static_cast<int>(v.size()) != model.manifold_dim)
      throw UsageError("--path waypoint '" + wp + "' needs " + std::to_string(model.manifold_dim) + " values");
    path.waypoints.push_back(from_std(v));
  }
  if (path.waypoints.size() < 2) throw UsageError("--path needs at least two waypoints separated by ';'");
  return path;
}

/// Straight segment when it stays in the domain, else the staircase.
Path path_between(const ModelSpec& model, const Vec& from, const Vec& to, int steps) {
  Path p = straight_path(from, to, steps);
  if (path_in_domain(p, model.domain_check())) return p;
  return staircase_path(from, to, steps);
}

ScalarField parse_lambda(const std::string& text, const Chart& chart) {
  if (text == "zero") return [](const Vec&) { return 0.0; };
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("--lambda must be zero, log:NAME or linear:NAME, got '" + text + "'");
  const std::string form = text.substr(0, colon);
  const std::string name = text.substr(colon + 1);
  const auto idx = chart.coordinate_index(name);
  if (!idx) throw UsageError("--lambda coordinate '" + name + "' is not in chart " + chart.name);
  const int k = *idx;
  if (form == "linear") return [k](const Vec& t) { return t[k]; };
  if (form == "log")
    return [k, name](const Vec& t) {
      if (!(t[k] > 0.0)) throw DomainError("gauge log:" + name + " needs " + name + " > 0 along the path");
      return std::log(t[k]);
    };
  throw UsageError("--lambda form must be zero, log or linear, got '" + form + "'");
}

std::vector<std::string> default_lambdas(const Chart& chart, const Path& path) {
  std::vector<std::string> out{"linear:" + chart.coordinates.front()};
  for (int k = chart.dim() - 1; k >= 0; --k) {
    const bool positive = std::all_of(path.waypoints.begin(), path.waypoints.end(),
                                      [k](const Vec& w) { return w[k] > 0.0; });
    if (positive) {
      out.push_back("log:" + chart.coordinates[k]);
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------- checks

double max_asymmetry(const Mat& r) { return max_abs(Mat(r - r.transpose())); }

ConnectionSpec connection_from(const std::string& name, double alpha) {
  if (name == "alpha") return ConnectionSpec::alpha_connection(alpha);
  if (name == "levi-civita") return ConnectionSpec::levi_civita();
  if (name == "weyl") return ConnectionSpec::weyl();
  throw UsageError("--connection must be alpha, levi-civita or weyl, got '" + name + "'");
}

/// One `check` evaluation; the JSON carries the check-specific extras.
json run_check(const std::string& what, const ModelSpec& model, const Vec& theta, const Vec& anchor,
               const RunConfig& config, double tolerance) {
  const GeometryOptions& opts = config.geometry;
  const int m = model.manifold_dim;
  if (what == "closedness") return diagnostic(what, theta, max_abs(closedness_residual(model, theta, opts)), tolerance);
  if (what == "duality") {
    const double a = config.alpha.value_or(0.0);
    json d = diagnostic(what, theta, duality_residual(model, theta, a, opts).max_abs(), tolerance);
    d["alpha"] = a;
    return d;
  }
  if (what == "nabla-g") {
    const double a = config.alpha.value_or(0.0);
    json d = diagnostic(what, theta, nabla_g_identity_residual(model, theta, a, opts).max_abs(), tolerance);
    d["alpha"] = a;
    return d;
  }
  if (what == "weyl-compat")
    return diagnostic(what, theta, weyl_compatibility_residual(model, theta, opts).max_abs(), tolerance);
  if (what == "trace-identity")
    return diagnostic(what, theta, max_abs(trace_identity_residual(model, theta, opts)), tolerance);
  if (what == "weyl-alpha-trace") {
    const double a = config.alpha.value_or(-0.5 * m);
    const LocalGeometry local = local_geometry(model, theta, opts);
    const Vec diff = connection_trace(weyl_coefficients(local)) - connection_trace(alpha_coefficients(local, a));
    json d = diagnostic(what, theta, max_abs(diff), tolerance);
    d["alpha"] = a;
    return d;
  }
  if (what == "ricci-symmetry") {
    const ConnectionSpec spec = connection_from(config.connection, config.alpha.value_or(0.0));
    json d = diagnostic(what, theta, max_asymmetry(ricci_tensor(model, theta, spec, opts)), tolerance);
    d["connection"] = spec.label();
    return d;
  }
  if (what == "gauge") {
    const Path path = config.path ? parse_path(*config.path, model, opts.path_steps)
                                  : path_between(model, anchor, theta, opts.path_steps);
    const auto lambdas = config.lambdas.empty() ? default_lambdas(model.chart(), path) : config.lambdas;
    double worst = 0.0;
    json per = json::array();
    for (const auto& l : lambdas) {
      const double r = gauge_rescale_check(model, parse_lambda(l, model.chart()), path, opts);
      per.push_back({{"lambda", l}, {"residual", std::isfinite(r) ? json(r) : json(nullptr)}});
      worst = std::isfinite(r) ? std::max(worst, r) : std::numeric_limits<double>::infinity();
    }
    json d = diagnostic(what, theta, worst, tolerance);
    d["lambdas"] = per;
    return d;
  }
  throw UsageError("unknown check '" + what + "'");
}

// ---------------------------------------------------------------- subcommands

int cmd_tensor(const RunConfig& config, std::ostream& out) {
  if (!config.format.empty() && config.format != "json") throw UsageError("tensor output is json only");
  const Context ctx = make_context(config);
  ctx.model.require_interior(ctx.theta);
  const InformationTensors t = information_tensors(ctx.model, ctx.theta, config.geometry.quad);
  json doc;
  doc["model"] = ctx.model.id;
  doc["chart"] = ctx.model.chart().name;
  doc["coordinates"] = ctx.model.chart().coordinates;
  doc["theta"] = to_json(ctx.theta);
  doc["g"] = to_json(t.metric.g);
  doc["C"] = to_json(t.cubic.C);
  emit_json(config, out, doc);
  return kExitOk;
}

int cmd_check(const RunConfig& config, std::ostream& out) {
  if (!config.format.empty() && config.format != "json") throw UsageError("check output is json only");
  if (std::find(kChecks.begin(), kChecks.end(), config.what) == kChecks.end())
    throw UsageError("--what must be one of closedness, duality, weyl-compat, ricci-symmetry, gauge, "
                     "trace-identity, nabla-g, weyl-alpha-trace");
  const Context ctx = make_context(config);
  ctx.model.require_interior(ctx.theta);
  json d = run_check(config.what, ctx.model, ctx.theta, ctx.anchor, config, config.tolerance.value_or(1e-6));
  d["model"] = ctx.model.id;
  d["chart"] = ctx.model.chart().name;
  emit_json(config, out, d);
  return d["pass"].get<bool>() ? kExitOk : kExitFailure;
}

GridSpec grid_for(const RunConfig& config, const ModelSpec& model) {
  if (!config.grid.empty()) return parse_grid(config.grid, model.chart().name);
  if (model.active_chart != 0)
    throw UsageError("--grid is required for chart " + model.chart().name + " of model " + model.id);
  return parse_grid(reference_grid(model), model.chart().name);
}

PriorField build_prior(PriorKind kind, const RunConfig& config, const Context& ctx) {
  const GridSpec grid = grid_for(config, ctx.model);
  switch (kind) {
    case PriorKind::uniform:
      return uniform_field(ctx.model, grid);
    case PriorKind::jeffreys:
      return jeffreys_field(ctx.model, grid, config.geometry);
    case PriorKind::alpha:
      if (!config.alpha) throw UsageError("--kind alpha requires --alpha");
      return alpha_prior_field(ctx.model, grid, *config.alpha, ctx.anchor, config.geometry);
    case PriorKind::weyl:
      return weyl_prior_field(ctx.model, grid, ctx.anchor, config.geometry);
    case PriorKind::tabulated:
      break;
  }
  throw UsageError("a tabulated prior is read with --prior-file");
}

PriorKind kind_arg(const std::string& text) {
  try {
    return parse_prior_kind(text);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
}

void write_field_json(const PriorField& field, const ModelSpec& model, std::ostream& out) {
  json doc;
  doc["model"] = model.id;
  doc["chart"] = field.chart();
  doc["kind"] = to_string(field.kind);
  doc["coordinates"] = field.support.coordinates;
  json pts = json::array();
  for (const auto& p : field.support.points) pts.push_back(to_json(p));
  doc["points"] = pts;
  doc["values"] = field.values;
  doc["normalized"] = field.normalized;
  out << doc.dump(2) << '\n';
}

int cmd_prior(const RunConfig& config, std::ostream& out) {
  const std::string format = config.format.empty() ? "csv" : config.format;
  if (format != "csv" && format != "json") throw UsageError("--format must be csv or json");
  const Context ctx = make_context(config);
  PriorField field = build_prior(kind_arg(config.kind), config, ctx);
  if (config.normalize) field = normalize_over_grid(std::move(field));
  Output o(config.out, out);
  if (format == "csv")
    write_prior_csv(field, o.stream());
  else
    write_field_json(field, ctx.model, o.stream());
  o.finish();
  return kExitOk;
}

int cmd_posterior(const RunConfig& config, std::ostream& out) {
  const std::string format = config.format.empty() ? "csv" : config.format;
  if (format != "csv" && format != "json") throw UsageError("--format must be csv or json");
  Context ctx = make_context(config);

  PriorField prior;
  if (!config.prior_file.empty()) {
    std::ifstream in(config.prior_file);
    if (!in) throw Error("cannot open prior file '" + config.prior_file + "'");
    prior = read_prior_csv(in, ctx.model, config.prior_file);
    if (prior.chart() != ctx.model.chart().name) ctx.model = ctx.model.with_chart(prior.chart());
  } else {
    prior = build_prior(kind_arg(config.kind), config, ctx);
  }

  Dataset data;
  if (!config.data_file.empty()) {
    data = load_observations(config.data_file, ctx.model);
  } else if (config.demo_n > 0) {
    if (!config.seed) throw UsageError("--demo-n requires an explicit --seed");
    ctx.model.require_interior(ctx.theta);
    data = simulate_observations(ctx.model, ctx.theta, config.demo_n, *config.seed);
  } else {
    throw UsageError("posterior needs --data FILE or --demo-n N --seed S");
  }

  const PosteriorGrid post = grid_posterior(ctx.model, prior, data);
  Output o(config.out, out);
  if (format == "csv") {
    write_posterior_csv(post, o.stream());
  } else {
    json doc;
    doc["model"] = ctx.model.id;
    doc["chart"] = post.support.chart;
    doc["prior_kind"] = to_string(prior.kind);
    doc["observations"] = data.size();
    doc["coordinates"] = post.support.coordinates;
    doc["mode"] = to_json(post.support.points[post.mode_index()]);
    json pts = json::array();
    for (const auto& p : post.support.points) pts.push_back(to_json(p));
    doc["points"] = pts;
    doc["log_density"] = post.log_values;
    doc["mass"] = post.masses;
    o.stream() << doc.dump(2) << '\n';
  }
  o.finish();
  return kExitOk;
}

// ---------------------------------------------------------------- verify-all

/// Largest relative deviation of a[i]/b[i] from its mean, with the worst index.
std::pair<double, std::size_t> ratio_deviation(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> r(a.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mean += (r[i] = a[i] / b[i]);
  mean /= static_cast<double>(a.size());
  std::pair<double, std::size_t> worst{0.0, 0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(r[i] / mean - 1.0);
    if (!(d <= worst.first)) worst = {d, i};
  }
  return worst;
}

/// Largest |a[i] − b[i]| / |b[i]| with the worst index.
std::pair<double, std::size_t> relative_difference(const std::vector<double>& a, const std::vector<double>& b) {
  std::pair<double, std::size_t> worst{0.0, 0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]) / std::abs(b[i]);
    if (!(d <= worst.first)) worst = {d, i};
  }
  return worst;
}

class Suite {
 public:
  void add(json d) { checks_.push_back(std::move(d)); }

  /// Runs `body`; a thrown error becomes a failed check naming θ.
  void guarded(const std::string& name, const std::optional<Vec>& theta, double tol, const std::function<json()>& body) {
    try {
      add(body());
    } catch (const Error& e) {
      json d = diagnostic(name, theta, std::numeric_limits<double>::infinity(), tol);
      d["error"] = e.what();
      add(std::move(d));
    }
  }

  const json& checks() const { return checks_; }
  std::size_t failures() const {
    return static_cast<std::size_t>(
        std::count_if(checks_.begin(), checks_.end(), [](const json& d) { return !d["pass"].get<bool>(); }));
  }

 private:
  json checks_ = json::array();
};

void point_checks(Suite& suite, const ModelSpec& model, const Vec& theta, const Vec& anchor, const RunConfig& config) {
  const GeometryOptions& opts = config.geometry;
  const int m = model.manifold_dim;
  const LocalGeometry local = local_geometry(model, theta, opts);

  for (const ConnectionSpec& spec : {ConnectionSpec::levi_civita(), ConnectionSpec::alpha_connection(1.5),
                                     ConnectionSpec::alpha_connection(-m), ConnectionSpec::weyl()}) {
    const Tensor3 gamma = coefficients(local, spec);
    json d = diagnostic("torsion-free", theta, lower_pair_asymmetry(gamma), 0.0);
    d["connection"] = spec.label();
    suite.add(d);
  }
  suite.add(diagnostic("closedness", theta, max_abs(closedness_residual(model, theta, opts)), 1e-6));
  for (double a : {-1.0, 0.5, 1.5}) {
    json d = diagnostic("duality", theta, duality_residual(local, a).max_abs(), 1e-6);
    d["alpha"] = a;
    suite.add(d);
    json e = diagnostic("nabla-g", theta, nabla_g_identity_residual(local, a).max_abs(), 1e-6);
    e["alpha"] = a;
    suite.add(e);
  }
  suite.add(diagnostic("weyl-compat", theta, weyl_compatibility_residual(local).max_abs(), 1e-6));
  suite.add(diagnostic("trace-identity", theta, max_abs(trace_identity_residual(local)), 1e-6));
  {
    const double a = -0.5 * m;
    const Vec diff = connection_trace(weyl_coefficients(local)) - connection_trace(alpha_coefficients(local, a));
    json d = diagnostic("weyl-alpha-trace", theta, max_abs(diff), 1e-6);
    d["alpha"] = a;
    suite.add(d);
  }
  for (const ConnectionSpec& spec :
       {ConnectionSpec::alpha_connection(-2.0), ConnectionSpec::alpha_connection(0.0),
        ConnectionSpec::alpha_connection(1.0), ConnectionSpec::alpha_connection(2.0), ConnectionSpec::weyl()}) {
    json d = diagnostic("ricci-symmetry", theta, max_asymmetry(ricci_tensor(model, theta, spec, opts)), 1e-6);
    d["connection"] = spec.label();
    suite.add(d);
  }
  suite.guarded("path-independence", theta, 1e-6, [&] {
    const OneFormField phi = [&](const Vec& t) { return weyl_one_form(model, t, opts).phi; };
    const auto inside = model.domain_check();
    const Path straight = straight_path(anchor, theta, opts.path_steps);
    const Path stair = staircase_path(anchor, theta, opts.path_steps);
    if (!path_in_domain(straight, inside) || !path_in_domain(stair, inside)) {
      json d = diagnostic("path-independence", theta, 0.0, 1e-6);
      d["note"] = "only one of the two paths stays in the domain";
      return d;
    }
    const double a = line_integral_gauss(phi, straight, inside);
    const double b = line_integral_gauss(phi, stair, inside);
    return diagnostic("path-independence", theta, std::abs(a - b) / std::max(1.0, std::abs(a)), 1e-6);
  });
  suite.guarded("gauge", theta, 1e-6, [&] {
    RunConfig gauge = config;
    gauge.path.reset();
    gauge.lambdas.clear();
    return run_check("gauge", model, theta, anchor, gauge, 1e-6);
  });
}

void grid_checks(Suite& suite, const ModelSpec& model, const RunConfig& config, const std::vector<Vec>& points) {
  const GeometryOptions& opts = config.geometry;
  const int m = model.manifold_dim;
  const GridSpec grid = parse_grid(reference_grid(model), model.chart().name);
  const PointSet support = grid_points(model, grid);
  const Vec anchor = model.anchor();
  auto at = [&](std::size_t i) { return std::optional<Vec>(support.points[i]); };

  suite.guarded("closedness-grid", std::nullopt, 1e-6, [&] {
    std::pair<double, std::size_t> worst{0.0, 0};
    for (std::size_t i = 0; i < support.points.size(); ++i) {
      const double r = max_abs(closedness_residual(model, support.points[i], opts));
      if (!(r <= worst.first)) worst = {r, i};
    }
    return diagnostic("closedness-grid", at(worst.second), worst.first, 1e-6);
  });

  const PriorField jeffreys = jeffreys_field(model, support, opts);
  const PriorField weyl = weyl_prior_field(model, support, anchor, opts);

  suite.guarded("weyl-alpha-ratio", std::nullopt, 1e-8, [&] {
    const PriorField alpha = alpha_prior_field(model, support, -m, anchor, opts);
    const auto [dev, i] = ratio_deviation(weyl.values, alpha.values);
    json d = diagnostic("weyl-alpha-ratio", at(i), dev, 1e-8);
    d["alpha"] = -m;
    return d;
  });

  suite.guarded("alpha-zero-jeffreys", std::nullopt, 0.0, [&] {
    const PriorField zero = alpha_prior_field(model, support, 0.0, anchor, opts);
    const auto [dev, i] = relative_difference(zero.values, jeffreys.values);
    return diagnostic("alpha-zero-jeffreys", at(i), dev, 0.0);
  });

  suite.guarded("alpha-continuity", std::nullopt, 1e-5, [&] {
    double worst = 0.0;
    std::size_t where = 0;
    for (double a : {-1e-6, 1e-6}) {
      const PriorField near = alpha_prior_field(model, support, a, anchor, opts);
      const auto [dev, i] = relative_difference(near.values, jeffreys.values);
      if (!(dev <= worst)) worst = dev, where = i;
    }
    return diagnostic("alpha-continuity", at(where), worst, 1e-5);
  });

  suite.guarded("anchor-shift", std::nullopt, 1e-8, [&] {
    const Vec other = points.size() > 1 ? points[1] : points.front();
    const PriorField a = normalize_over_grid(weyl);
    const PriorField b = normalize_over_grid(weyl_prior_field(model, support, other, opts));
    const auto [dev, i] = relative_difference(b.values, a.values);
    return diagnostic("anchor-shift", at(i), dev, 1e-8);
  });

  for (std::size_t c = 1; c < model.charts.size(); ++c) {
    const std::string target = model.charts[c].name;
    const ModelSpec native_model = model.with_chart(target);
    for (const PriorField* field : {&jeffreys, &weyl}) {
      const std::string name = "reparam-" + to_string(field->kind);
      suite.guarded(name, std::nullopt, 1e-6, [&] {
        const PriorField moved = reparam_transform(*field, model, target);
        const PriorField native = field->kind == PriorKind::jeffreys
                                      ? jeffreys_field(native_model, moved.support, opts)
                                      : weyl_prior_field(native_model, moved.support, *moved.anchor, opts);
        const auto [dev, i] = relative_difference(moved.values, native.values);
        json d = diagnostic(name, std::optional<Vec>(moved.support.points[i]), dev, 1e-6);
        d["chart"] = target;
        return d;
      });
    }
  }

  if (model.id == "gaussian1d") {
    suite.add(diagnostic("weyl-constancy", std::nullopt, relative_spread(weyl), 1e-6));
    const auto worst = std::max_element(weyl.values.begin(), weyl.values.end(), [](double a, double b) {
      return std::abs(a - M_SQRT1_2) < std::abs(b - M_SQRT1_2);
    });
    const auto i = static_cast<std::size_t>(worst - weyl.values.begin());
    json d = diagnostic("weyl-value", at(i), std::abs(*worst - M_SQRT1_2), 1e-6);
    d["expected"] = M_SQRT1_2;
    suite.add(d);
  }
}

int cmd_verify_all(const RunConfig& config, std::ostream& out) {
  if (!config.format.empty() && config.format != "json") throw UsageError("verify-all output is json only");
  const Context ctx = make_context(config);
  const ModelSpec reference = ctx.model.with_chart(ctx.model.reference_chart().name);
  Suite suite;

  std::vector<Vec> ref_points = reference_test_points(reference);
  for (const Vec& ref : ref_points) {
    const Vec theta = ctx.model.from_reference(ref);
    try {
      point_checks(suite, ctx.model, theta, ctx.anchor, config);
    } catch (const Error& e) {
      json d = diagnostic("point-suite", theta, std::numeric_limits<double>::infinity(), 1e-6);
      d["error"] = e.what();
      suite.add(d);
    }
  }
  grid_checks(suite, reference, config, ref_points);

  json doc;
  doc["model"] = ctx.model.id;
  doc["chart"] = ctx.model.chart().name;
  doc["checks"] = suite.checks();
  doc["failed"] = suite.failures();
  doc["pass"] = suite.failures() == 0;
  emit_json(config, out, doc);
  return suite.failures() == 0 ? kExitOk : kExitFailure;
}

std::string command_name(Subcommand c) {
  switch (c) {
    case Subcommand::tensor: return "tensor";
    case Subcommand::check: return "check";
    case Subcommand::prior: return "prior";
    case Subcommand::posterior: return "posterior";
    case Subcommand::verify_all: return "verify-all";
  }
  return "?";
}

}  // namespace

RunConfig parse_command_line(const std::vector<std::string>& args) {
  CLI::App app{"Fisher geometry, alpha/Weyl connections and invariant priors for parametric models", "weylprior"};
  app.require_subcommand(1, 1);

  RunConfig config;
  std::string theta, anchor, alpha, tolerance, path, seed;
  int quad_nodes = 0;
  double fd_step = config.geometry.diff.step;
  int path_steps = config.geometry.path_steps;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--model", config.model, "gaussian1d | gaussian_mv:n | bernoulli | poisson")->capture_default_str();
    sub->add_option("--chart", config.chart, "coordinate chart (default: the model's reference chart)");
    sub->add_option("--quad-nodes", quad_nodes, "Gauss-Hermite nodes per axis (0: 64 / 32 / 8 by dimension)");
    sub->add_option("--fd-step", fd_step, "relative finite-difference step")->capture_default_str();
    sub->add_option("--path-steps", path_steps, "integration panels per path segment")->capture_default_str();
    sub->add_option("--out", config.out, "output file (default: stdout)");
    sub->add_option("--format", config.format, "csv | json");
  };

  CLI::App* tensor = app.add_subcommand("tensor", "Fisher metric and Amari-Chentsov tensor at a point (JSON)");
  common(tensor);
  tensor->add_option("--theta", theta, "comma-separated point in the chart");

  CLI::App* check = app.add_subcommand("check", "evaluate one geometric identity at a point (JSON)");
  common(check);
  check->add_option("--what", config.what, "closedness | duality | weyl-compat | ricci-symmetry | gauge | "
                                           "trace-identity | nabla-g | weyl-alpha-trace")
      ->required();
  check->add_option("--theta", theta, "comma-separated point in the chart");
  check->add_option("--alpha", alpha, "alpha for duality, nabla-g, ricci-symmetry and weyl-alpha-trace");
  check->add_option("--tolerance", tolerance, "pass threshold on max_residual (default 1e-6)");
  check->add_option("--connection", config.connection, "alpha | levi-civita | weyl (ricci-symmetry)")
      ->capture_default_str();
  check->add_option("--lambda", config.lambdas, "gauge field: zero | log:NAME | linear:NAME (repeatable)");
  check->add_option("--path", path, "gauge path waypoints 'a1,a2;b1,b2;...' (default: anchor to theta)");
  check->add_option("--anchor", anchor, "start of the default gauge path");

  CLI::App* prior = app.add_subcommand("prior", "prior density over a grid (CSV)");
  common(prior);
  prior->add_option("--kind", config.kind, "uniform | jeffreys | alpha | weyl")->capture_default_str();
  prior->add_option("--alpha", alpha, "alpha of an alpha-parallel prior");
  prior->add_option("--anchor", anchor, "point where the potential vanishes");
  prior->add_option("--grid", config.grid, "name=min:max:count[:log],... ; name=value pins a coordinate");
  prior->add_flag("--normalize", config.normalize, "rescale to unit mass over the grid");

  CLI::App* posterior = app.add_subcommand("posterior", "grid posterior from a prior and observations (CSV)");
  common(posterior);
  posterior->add_option("--prior-file", config.prior_file, "prior CSV written by the prior subcommand");
  posterior->add_option("--prior-kind", config.kind, "uniform | jeffreys | alpha | weyl")->capture_default_str();
  posterior->add_option("--alpha", alpha, "alpha of an alpha-parallel prior");
  posterior->add_option("--anchor", anchor, "point where the potential vanishes");
  posterior->add_option("--grid", config.grid, "prior grid when no --prior-file is given");
  posterior->add_option("--data", config.data_file, "observation CSV, no header, one row per observation");
  posterior->add_option("--demo-n", config.demo_n, "simulate N observations at --theta instead of --data");
  posterior->add_option("--seed", seed, "seed for --demo-n");
  posterior->add_option("--theta", theta, "true parameter for --demo-n");

  CLI::App* verify = app.add_subcommand("verify-all", "run every geometry and prior invariant for a model (JSON)");
  common(verify);
  verify->add_option("--anchor", anchor, "anchor for potentials");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    if (app.get_subcommands().empty() && msg.find("subcommand") != std::string::npos) msg += "\n" + app.help();
    throw UsageError(msg);
  }
  for (CLI::App* sub : {tensor, check, prior, posterior, verify})
    if (sub->parsed()) config.command = parse_subcommand(sub->get_name());

  if (!theta.empty()) config.theta = parse_list(theta, "--theta");
  if (!anchor.empty()) config.anchor = parse_list(anchor, "--anchor");
  if (!alpha.empty()) config.alpha = parse_number(alpha, "--alpha");
  if (!tolerance.empty()) {
    config.tolerance = parse_number(tolerance, "--tolerance");
    if (*config.tolerance < 0.0) throw UsageError("--tolerance must be non-negative");
  }
  if (!path.empty()) config.path = path;
  if (!seed.empty()) {
    std::uint64_t s = 0;
    const auto [ptr, ec] = std::from_chars(seed.data(), seed.data() + seed.size(), s);
    if (ec != std::errc{} || ptr != seed.data() + seed.size()) throw UsageError("bad --seed '" + seed + "'");
    config.seed = s;
  }
  if (quad_nodes < 0 || quad_nodes == 1) throw UsageError("--quad-nodes must be 0 or at least 2");
  if (!(fd_step > 0.0)) throw UsageError("--fd-step must be positive");
  if (path_steps < 1) throw UsageError("--path-steps must be at least 1");
  config.geometry.quad.nodes = quad_nodes;
  config.geometry.diff.step = fd_step;
  config.geometry.path_steps = path_steps;
  return config;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    switch (config.command) {
      case Subcommand::tensor: return cmd_tensor(config, out);
      case Subcommand::check: return cmd_check(config, out);
      case Subcommand::prior: return cmd_prior(config, out);
      case Subcommand::posterior: return cmd_posterior(config, out);
      case Subcommand::verify_all: return cmd_verify_all(config, out);
    }
  } catch (const UsageError& e) {
    err << "weylprior: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "weylprior: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    const std::string check = config.command == Subcommand::check ? config.what : command_name(config.command);
    json d = diagnostic(check, config.theta ? std::optional<Vec>(from_std(*config.theta)) : std::nullopt,
                        std::numeric_limits<double>::infinity(), config.tolerance.value_or(1e-6));
    d["error"] = e.what();
    err << d.dump() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = parse_command_line(args);
  } catch (const HelpRequested& h) {
    out << h.what();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "weylprior: " << e.what() << '\n';
    return kExitUsage;
  }
  return run(config, out, err);
}

}  // namespace weylprior::cli
