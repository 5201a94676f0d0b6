#include "test_support.hpp"

#include "weylprior/errors.hpp"
#include "weylprior/priors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace weylprior {
namespace {

using testing::rel_err;

const ModelSpec& gaussian() {
  static const ModelSpec m = get_model("gaussian1d");
  return m;
}

const ModelSpec& gaussian_mv2() {
  static const ModelSpec m = get_model("gaussian_mv", {2});
  return m;
}

const Vec kAnchor{{0.0, 1.0}};
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

GridSpec small_grid() { return parse_grid("mu=-1:1:3,s2=0.5:8:5:log"); }

TEST(ParseGrid, AxesAndFixedCoordinates) {
  const GridSpec g = parse_grid("mu=-2:2:21,s2=0.25:16:21:log");
  ASSERT_EQ(g.axes.size(), 2u);
  EXPECT_EQ(g.size(), 441u);
  EXPECT_EQ(g.axes[1].spacing, Spacing::log);
  const auto v = g.axes[1].values();
  EXPECT_EQ(v.front(), 0.25);
  EXPECT_EQ(v.back(), 16.0);
  EXPECT_NEAR(v[10], 2.0, 1e-14);
  EXPECT_NEAR(g.axes[0].values()[5], -1.0, 1e-15);

  const GridSpec pinned = parse_grid("mu=0.5,s2=1:4:4");
  EXPECT_EQ(pinned.fixed.at("mu"), 0.5);
  EXPECT_EQ(pinned.size(), 4u);
  const PointSet pts = grid_points(gaussian(), pinned);
  for (const Vec& p : pts.points) EXPECT_EQ(p[0], 0.5);
}

TEST(ParseGrid, PointOrderFirstAxisOutermost) {
  const PointSet pts = grid_points(gaussian(), parse_grid("mu=0:1:2,s2=1:2:3"));
  ASSERT_EQ(pts.points.size(), 6u);
  EXPECT_EQ(pts.points[1], (Vec{{0.0, 1.5}}));
  EXPECT_EQ(pts.points[3], (Vec{{1.0, 1.0}}));
  EXPECT_EQ(pts.coordinates, (std::vector<std::string>{"mu", "s2"}));
}

TEST(ParseGrid, Errors) {
  EXPECT_THROW(parse_grid("mu=-2:2"), ConfigError);
  EXPECT_THROW(parse_grid("mu=-2:2:1"), ConfigError);
  EXPECT_THROW(parse_grid("mu=-2:2:x"), ConfigError);
  EXPECT_THROW(parse_grid("mu=-2:2:4:cubic"), ConfigError);
  EXPECT_THROW(parse_grid("mu"), ConfigError);
  const Chart& c = gaussian().chart();
  EXPECT_THROW(parse_grid("mu=2:-2:5,s2=1:2:3").validate(c), ConfigError);
  EXPECT_THROW(parse_grid("mu=-1:1:3,s2=-1:2:3:log").validate(c), ConfigError);
  EXPECT_THROW(parse_grid("mu=-1:1:3,sigma=1:2:3").validate(c), ConfigError);
  EXPECT_THROW(parse_grid("mu=-1:1:3").validate(c), ConfigError);
  EXPECT_THROW(parse_grid("mu=-1:1:3,s2=1:2:3,mu=0").validate(c), ConfigError);
  EXPECT_THROW(grid_points(gaussian(), parse_grid("mu=-1:1:3,s2=-1:2:3")), DomainError);
}

TEST(TrapezoidWeights, HalfCellsAtEnds) {
  const auto w = trapezoid_weights({0.0, 1.0, 3.0});
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w[0], 0.5);
  EXPECT_EQ(w[1], 1.5);
  EXPECT_EQ(w[2], 1.0);
}

TEST(Jeffreys, Gaussian1dExamples) {
  const PriorField f = jeffreys_field(gaussian(), parse_grid("mu=-1:1:3,s2=1:4:2"));
  ASSERT_EQ(f.size(), 6u);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double s2 = f.support.points[i][1];
    EXPECT_NEAR(f.values[i], kInvSqrt2 * std::pow(s2, -1.5), 1e-12) << i;
  }
  EXPECT_NEAR(f.values[0], 0.7071068, 1e-7);
  EXPECT_NEAR(f.values[1], 0.0883883, 1e-7);
  EXPECT_EQ(f.values[0], f.values[4]);
}

TEST(AlphaPrior, ZeroIsJeffreys) {
  const GridSpec g = small_grid();
  const PriorField j = jeffreys_field(gaussian(), g);
  const PriorField a = alpha_prior_field(gaussian(), g, 0.0, kAnchor);
  EXPECT_EQ(a.values, j.values);
}

TEST(AlphaPrior, Gaussian1dExamples) {
  const GridSpec g = parse_grid("mu=0,s2=0.5:8:5:log");
  for (double v : alpha_prior_field(gaussian(), g, -2.0, kAnchor).values) EXPECT_NEAR(v, 0.7071068, 1e-7);
  const PriorField a2 = alpha_prior_field(gaussian(), parse_grid("mu=0,s2=1:4:2"), 2.0, kAnchor);
  EXPECT_LT(rel_err(a2.values[1], 0.011048543456039808), 1e-9);
  EXPECT_LT(rel_err(a2.values[0], kInvSqrt2), 1e-12);
}

TEST(WeylPrior, Gaussian1dIsConstant) {
  const PriorField w = weyl_prior_field(gaussian(), small_grid(), kAnchor);
  for (double v : w.values) EXPECT_NEAR(v, kInvSqrt2, 1e-6);
  EXPECT_LT(relative_spread(w), 1e-6);
  const PriorField shifted = weyl_prior_field(gaussian(), parse_grid("mu=0,s2=1:4:2"), Vec{{0.0, 4.0}});
  EXPECT_NEAR(shifted.values[0], 0.7071068 / 8.0, 1e-7);
  EXPECT_NEAR(shifted.values[1], 0.7071068 / 8.0, 1e-7);
}

/// Weyl prior ∝ (det Σ)^p along the diagonal of the covariance block: p = 3 for n = 2.
TEST(WeylPrior, GaussianMvPowerOfDeterminant) {
  GeometryOptions opts;
  opts.path_steps = 32;
  const GridSpec g = parse_grid("mu1=0,mu2=0,s11=0.5:4:3:log,s12=0,s22=0.5:4:3:log");
  const PriorField w = weyl_prior_field(gaussian_mv2(), g, gaussian_mv2().anchor(), opts);
  Eigen::MatrixXd design(w.size(), 2);
  Vec rhs(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Vec& p = w.support.points[i];
    design(i, 0) = 1.0;
    design(i, 1) = std::log(p[2] * p[4]);
    rhs[i] = std::log(w.values[i]);
  }
  const Vec beta = design.colPivHouseholderQr().solve(rhs);
  EXPECT_NEAR(beta[1], 3.0, 1e-6);
  EXPECT_LT((design * beta - rhs).lpNorm<Eigen::Infinity>(), 1e-6);
}

TEST(TheoremRatio, WeylEqualsAlphaAtMinusDimension) {
  const TheoremCheck c = theorem_ratio_check(gaussian(), parse_grid("mu=-2:2:5,s2=0.25:16:5:log"), kAnchor);
  EXPECT_EQ(c.alpha, -2.0);
  EXPECT_LT(c.max_rel_deviation, 1e-12);
  GeometryOptions opts;
  opts.path_steps = 32;
  const TheoremCheck mv = theorem_ratio_check(
      gaussian_mv2(), parse_grid("mu1=0,mu2=0.5,s11=0.5:4:2:log,s12=0.1,s22=0.5:4:2:log"), gaussian_mv2().anchor(), opts);
  EXPECT_EQ(mv.alpha, -5.0);
  EXPECT_LT(mv.max_rel_deviation, 1e-12);
}

TEST(TheoremRatio, OtherAlphaIsNotProportional) {
  const TheoremCheck c = theorem_ratio_check(gaussian(), parse_grid("mu=0,s2=0.5:8:5:log"), kAnchor, {}, -1.0);
  EXPECT_GT(c.max_rel_deviation, 0.1);
}

TEST(Reparam, GaussianJeffreysToStandardDeviation) {
  const PriorField j = jeffreys_field(gaussian(), parse_grid("mu=-1:1:3,s2=0.5:8:5:log"));
  const PriorField t = reparam_transform(j, gaussian(), "mu_sigma");
  EXPECT_EQ(t.chart(), "mu_sigma");
  EXPECT_EQ(t.support.coordinates, (std::vector<std::string>{"mu", "sigma"}));
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double sigma = t.support.points[i][1];
    EXPECT_LT(rel_err(t.values[i], std::sqrt(2.0) / (sigma * sigma)), 1e-9);
    EXPECT_LT(rel_err(sigma * sigma, j.support.points[i][1]), 1e-15);
  }
  const PriorField same = reparam_transform(j, gaussian(), "mu_s2");
  EXPECT_EQ(same.values, j.values);
}

TEST(Reparam, WeylToStandardDeviation) {
  const PriorField w = weyl_prior_field(gaussian(), small_grid(), kAnchor);
  const PriorField t = reparam_transform(w, gaussian(), "mu_sigma");
  for (std::size_t i = 0; i < t.size(); ++i)
    EXPECT_LT(rel_err(t.values[i], std::sqrt(2.0) * t.support.points[i][1]), 1e-6);
  ASSERT_TRUE(t.anchor.has_value());
  EXPECT_NEAR((*t.anchor)[1], 1.0, 1e-15);
}

/// Transforming a prior agrees with building it directly in the target chart.
TEST(ReparamProperty, MatchesNativeConstruction) {
  const PriorField j = jeffreys_field(gaussian(), small_grid());
  const PriorField w = weyl_prior_field(gaussian(), small_grid(), kAnchor);
  for (const std::string target : {"mu_sigma", "natural"}) {
    const ModelSpec other = gaussian().with_chart(target);
    const PriorField jt = reparam_transform(j, gaussian(), target);
    const PriorField wt = reparam_transform(w, gaussian(), target);
    PointSet pts = jt.support;
    const PriorField jn = jeffreys_field(other, pts);
    const PriorField wn = weyl_prior_field(other, pts, other.from_reference(kAnchor));
    for (std::size_t i = 0; i < jt.size(); ++i) {
      EXPECT_LT(rel_err(jt.values[i], jn.values[i]), 1e-6) << target << " " << i;
      EXPECT_LT(rel_err(wt.values[i], wn.values[i]), 1e-6) << target << " " << i;
    }
  }
}

TEST(Normalize, UnitMassOverGrid) {
  const PriorField n = normalize_over_grid(jeffreys_field(gaussian(), small_grid()));
  EXPECT_TRUE(n.normalized);
  double mass = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) mass += n.values[i] * n.support.cell_volumes[i];
  EXPECT_NEAR(mass, 1.0, 1e-14);
  double total_volume = 0.0;
  for (double v : n.support.cell_volumes) total_volume += v;
  EXPECT_NEAR(total_volume, 2.0 * 7.5, 1e-13);
}

TEST(PriorProperty, AnchorShiftIsConstantFactor) {
  const GridSpec g = parse_grid("mu=-2:2:5,s2=0.25:16:7:log");
  for (double a : {-1.0, 0.5, 2.0}) {
    const PriorField p = alpha_prior_field(gaussian(), g, a, kAnchor);
    const PriorField q = alpha_prior_field(gaussian(), g, a, Vec{{1.0, 3.0}});
    double lo = INFINITY, hi = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      lo = std::min(lo, q.values[i] / p.values[i]);
      hi = std::max(hi, q.values[i] / p.values[i]);
    }
    EXPECT_LT((hi - lo) / lo, 1e-8) << a;
  }
}

TEST(PriorProperty, ContinuousInAlphaAtZero) {
  const GridSpec g = small_grid();
  const PriorField j = jeffreys_field(gaussian(), g);
  for (double a : {-1e-6, 1e-6}) {
    const PriorField p = alpha_prior_field(gaussian(), g, a, kAnchor);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_LT(rel_err(p.values[i], j.values[i]), 1e-5);
  }
}

TEST(PriorKinds, ParseAndPrint) {
  for (PriorKind k : {PriorKind::uniform, PriorKind::jeffreys, PriorKind::alpha, PriorKind::weyl})
    EXPECT_EQ(parse_prior_kind(to_string(k)), k);
  EXPECT_THROW(parse_prior_kind("flat"), ConfigError);
  const PriorField u = uniform_field(gaussian(), small_grid());
  for (double v : u.values) EXPECT_EQ(v, 1.0);
}

TEST(PriorCsv, RoundTripIsBitExact) {
  const PriorField w = weyl_prior_field(gaussian(), parse_grid("mu=-2:2:5,s2=0.25:16:7:log"), kAnchor);
  std::stringstream s;
  write_prior_csv(w, s);
  EXPECT_EQ(s.str().substr(0, s.str().find('\n')), "mu,s2,value");
  const PriorField r = read_prior_csv(s, gaussian());
  EXPECT_EQ(r.kind, PriorKind::tabulated);
  EXPECT_EQ(r.chart(), "mu_s2");
  EXPECT_EQ(r.values, w.values);
  EXPECT_EQ(r.support.points, w.support.points);
  ASSERT_EQ(r.support.cell_volumes.size(), w.support.cell_volumes.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    EXPECT_LT(rel_err(r.support.cell_volumes[i], w.support.cell_volumes[i]), 1e-14);
}

TEST(PriorCsv, ChartSelectedByHeader) {
  std::stringstream s("mu,sigma,value\n0,1,2\n0,2,1\n1,1,2\n1,2,1\n");
  EXPECT_EQ(read_prior_csv(s, gaussian()).chart(), "mu_sigma");
}

TEST(PriorCsv, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 2.0, 1e-300, 0.011048543456039808}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(2.0), "2");
}

void expect_parse_error(const std::string& text, const std::string& fragment) {
  std::stringstream s(text);
  try {
    read_prior_csv(s, gaussian(), "prior.csv");
    ADD_FAILURE() << "no error for: " << text;
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

TEST(PriorCsv, ReadErrors) {
  expect_parse_error("", "empty");
  expect_parse_error("mu,s2\n", "prior.csv:1");
  expect_parse_error("a,b,value\n", "no chart");
  expect_parse_error("mu,s2,value\n", "no rows");
  expect_parse_error("mu,s2,value\n0,1,1\n0,x,1\n", "prior.csv:3");
  expect_parse_error("mu,s2,value\n0,1\n", "prior.csv:2");
  expect_parse_error("mu,s2,value\n0,1,0\n", "positive");
  expect_parse_error("mu,s2,value\n0,-1,1\n", "outside");
  expect_parse_error("mu,s2,value\n0,1,1\n1,2,1\n", "rectilinear");
}

}  // namespace
}  // namespace weylprior
