#include "weylprior/errors.hpp"
#include "weylprior/geometry.hpp"
#include "weylprior/numerics/path.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace weylprior {
namespace {

const OneFormField kLogVariance = [](const Vec& t) { return Vec{{0.0, 1.5 / t[1]}}; };
const DomainCheck kPositiveVariance = [](const Vec& t) { return t[1] > 0.0; };

TEST(LineIntegral, ThreeHalvesLogVariance) {
  const Path p = straight_path(Vec{{0.0, 1.0}}, Vec{{0.0, std::exp(2.0)}});
  // Second-order midpoint error bound h²/24 · ∫|f''| for 256 steps.
  EXPECT_NEAR(line_integral(kLogVariance, p, kPositiveVariance), 3.0, 1e-4);
  EXPECT_NEAR(line_integral_gauss(kLogVariance, p, kPositiveVariance), 3.0, 1e-10);
}

TEST(LineIntegral, DegeneratePathIsZero) {
  const Vec p{{0.3, 2.0}};
  EXPECT_EQ(line_integral(kLogVariance, straight_path(p, p)), 0.0);
  EXPECT_EQ(line_integral_gauss(kLogVariance, straight_path(p, p)), 0.0);
}

TEST(LineIntegral, WeylFormTwoPathsAgree) {
  const ModelSpec m = get_model("gaussian1d");
  const OneFormField phi = [&](const Vec& t) { return weyl_one_form(m, t).phi; };
  const Vec a{{0.0, 1.0}}, b{{1.0, 2.0}};
  const Path straight = straight_path(a, b);
  const Path stairs = staircase_path(a, b);
  const double oracle = 1.5 * std::log(2.0);
  const double s1 = line_integral(phi, straight), s2 = line_integral(phi, stairs);
  EXPECT_NEAR(s1, s2, 1e-8);
  EXPECT_NEAR(s1, oracle, 1e-5);
  const double g1 = line_integral_gauss(phi, straight), g2 = line_integral_gauss(phi, stairs);
  EXPECT_NEAR(g1, g2, 1e-8);
  EXPECT_NEAR(g1, oracle, 1e-8);
}

/// Doubling the steps cuts the midpoint error by about four.
TEST(LineIntegralProperty, SecondOrderConvergence) {
  const OneFormField omega = [](const Vec& t) { return Vec{{std::cos(t[0]) * t[1], std::sin(t[0])}}; };
  const Vec a{{0.0, 0.0}}, b{{2.0, 1.5}};
  const double exact = std::sin(2.0) * 1.5;  // potential sin(x)·y
  double previous = 0.0;
  for (int steps : {8, 16, 32, 64, 128}) {
    const double err = std::abs(line_integral(omega, straight_path(a, b, steps)) - exact);
    if (previous > 0.0) EXPECT_GE(previous / err, 3.5) << steps;
    previous = err;
  }
}

TEST(LineIntegralProperty, GaussLegendreSixthOrder) {
  const auto f = [](const Vec& t) { return Vec{{std::exp(t[0])}}; };
  const Vec a = Vec::Constant(1, 0.0), b = Vec::Constant(1, 2.0);
  const double exact = std::exp(2.0) - 1.0;
  const double e4 = std::abs(line_integral_gauss(f, straight_path(a, b, 4)) - exact);
  const double e8 = std::abs(line_integral_gauss(f, straight_path(a, b, 8)) - exact);
  EXPECT_GE(e4 / e8, 50.0);
}

TEST(Paths, StaircaseMovesOneCoordinateAtATime) {
  const Path p = staircase_path(Vec{{0.0, 1.0, 5.0}}, Vec{{2.0, 1.0, 3.0}});
  ASSERT_EQ(p.waypoints.size(), 3u);
  EXPECT_EQ(p.waypoints[1], (Vec{{2.0, 1.0, 5.0}}));
  EXPECT_EQ(p.waypoints[2], (Vec{{2.0, 1.0, 3.0}}));
}

TEST(Paths, DomainViolations) {
  const Path crossing = straight_path(Vec{{0.0, 1.0}}, Vec{{0.0, -1.0}});
  EXPECT_FALSE(path_in_domain(crossing, kPositiveVariance));
  EXPECT_THROW(line_integral(kLogVariance, crossing, kPositiveVariance), DomainError);
  EXPECT_THROW(line_integral_gauss(kLogVariance, crossing, kPositiveVariance), DomainError);
  EXPECT_TRUE(path_in_domain(straight_path(Vec{{0.0, 1.0}}, Vec{{3.0, 9.0}}), kPositiveVariance));
  EXPECT_THROW(line_integral(kLogVariance, Path{{Vec{{0.0, 1.0}}}, 4}), ConfigError);
  EXPECT_THROW(line_integral(kLogVariance, Path{{Vec{{0.0, 1.0}}, Vec{{0.0, 2.0}}}, 0}), ConfigError);
}

TEST(Paths, NonFiniteFormIsReported) {
  const OneFormField bad = [](const Vec&) { return Vec{{std::nan(""), 0.0}}; };
  EXPECT_THROW(line_integral(bad, straight_path(Vec{{0.0, 1.0}}, Vec{{1.0, 1.0}})), NumericalError);
}

}  // namespace
}  // namespace weylprior
