// SPDX-License-Identifier: Apache-2.0
#include "nohis/linalg.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "nohis/error.hpp"
#include "oracles.hpp"

namespace nohis {
namespace {

using fixtures::to_set;

DenseVector random_unit(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  DenseVector u(n);
  double len = 0;
  for (double& x : u) {
    x = g(rng);
    len += x * x;
  }
  for (double& x : u) x /= std::sqrt(len);
  return u;
}

void expect_near_vec(std::span<const double> a, std::span<const double> b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << "component " << i;
}

TEST(Centroid, SingleVectorIsItself) {
  expect_near_vec(centroid(to_set({{3, 4}})), DenseVector{3, 4}, 0);
}

TEST(Centroid, SymmetricPair) {
  expect_near_vec(centroid(to_set({{1, 0}, {0, 1}})), DenseVector{0.5, 0.5}, 1e-15);
}

TEST(Centroid, ThreePoints) {
  expect_near_vec(centroid(to_set({{1, 2}, {3, 4}, {5, 0}})), DenseVector{3, 2}, 1e-15);
}

TEST(Centroid, EmptySetThrows) {
  try {
    (void)centroid(VectorSet(2));
    FAIL() << "expected error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::empty_cluster);
    EXPECT_STREQ(e.what(), "empty cluster");
  }
}

TEST(ScatterValue, Examples) {
  EXPECT_EQ(scatter_value(to_set({{1, 1}, {1, 1}})), 0.0);
  EXPECT_DOUBLE_EQ(scatter_value(to_set({{0, 0}, {2, 0}})), 2.0);
  EXPECT_EQ(scatter_value(to_set({{7, -2}})), 0.0);
}

TEST(LeadingPrincipalComponent, VarianceOnOneAxis) {
  const auto u = leading_principal_component(to_set({{0, 1}, {0, -1}, {0, 2}, {0, -2}}));
  expect_near_vec(u, DenseVector{0, 1}, 1e-12);
}

TEST(LeadingPrincipalComponent, ZeroScatterThrows) {
  try {
    (void)leading_principal_component(to_set({{5, 5}, {5, 5}}));
    FAIL() << "expected error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::degenerate_cluster);
    EXPECT_STREQ(e.what(), "degenerate cluster");
  }
}

TEST(LeadingPrincipalComponent, MatchesClosedForm2x2Eigenvector) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  oracle::Points pts;
  for (int i = 0; i < 100; ++i) {
    const double a = 3.0 * g(rng), b = 0.8 * g(rng);
    pts.push_back({0.6 * a - 0.8 * b + 4, 0.8 * a + 0.6 * b - 1});
  }
  const auto c = oracle::scatter_matrix(pts);
  // Closed-form top eigenvector of [[p, r], [r, s]].
  const double p = c[0], r = c[1], s = c[3];
  const double lambda = 0.5 * (p + s) + std::sqrt(0.25 * (p - s) * (p - s) + r * r);
  double ex = r, ey = lambda - p;
  const double len = std::hypot(ex, ey);
  ex /= len;
  ey /= len;

  const auto u = leading_principal_component(to_set(pts));
  const double sign = (u[0] * ex + u[1] * ey) < 0 ? -1.0 : 1.0;
  EXPECT_NEAR(u[0], sign * ex, 1e-8);
  EXPECT_NEAR(u[1], sign * ey, 1e-8);
  EXPECT_NEAR(norm(u), 1.0, 1e-12);
}

TEST(LeadingPrincipalComponent, AgreesWithJacobiIn12D) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto pts = oracle::random_points(300, 12, seed);
    for (auto& p : pts) p[seed % 12] *= 4.0;  // make the top eigenvalue distinct
    const auto u = leading_principal_component(to_set(pts));
    const auto ref = oracle::top_eigenvector(pts);
    double cosine = 0;
    for (std::size_t i = 0; i < 12; ++i) cosine += u[i] * ref[i];
    EXPECT_NEAR(std::abs(cosine), 1.0, 1e-10);
  }
}

TEST(LeadingPrincipalComponent, SignConventionFirstNonzeroPositive) {
  const auto u = leading_principal_component(to_set({{-3, -3}, {3, 3}, {-1, -1.2}, {1, 1.2}}));
  EXPECT_GT(u[0], 0);
}

TEST(LeadingPrincipalComponent, RayleighQuotientDominates) {
  std::mt19937_64 rng(5);
  auto pts = oracle::random_points(400, 12, 77);
  for (auto& p : pts) {
    p[2] *= 2.5;
    p[7] += 0.7 * p[2];
  }
  const auto cov = oracle::scatter_matrix(pts);
  auto rayleigh = [&](const DenseVector& z) {
    double acc = 0;
    for (std::size_t i = 0; i < 12; ++i)
      for (std::size_t j = 0; j < 12; ++j) acc += z[i] * cov[i * 12 + j] * z[j];
    return acc;
  };
  const auto u = leading_principal_component(to_set(pts));
  const double top = rayleigh(u);
  for (int i = 0; i < 100; ++i) EXPECT_GE(top, rayleigh(random_unit(12, rng)) - 1e-8 * top);
}

TEST(LeadingPrincipalComponent, MatrixFreePathAboveDimensionThreshold) {
  constexpr std::size_t n = detail::kExplicitCovarianceMaxDim + 6;
  auto pts = oracle::random_points(500, n, 3);
  for (auto& p : pts) p[5] *= 5.0;
  const auto u = leading_principal_component(to_set(pts));
  const auto ref = oracle::top_eigenvector(pts);
  double cosine = 0;
  for (std::size_t i = 0; i < n; ++i) cosine += u[i] * ref[i];
  EXPECT_NEAR(std::abs(cosine), 1.0, 1e-8);
}

TEST(MakeReflection, AlignedDirectionIsIdentity) {
  EXPECT_TRUE(make_reflection(DenseVector{1, 0, 0}).is_identity());
}

TEST(MakeReflection, QuarterTurnDirection) {
  const auto r = make_reflection(DenseVector{0, 1});
  ASSERT_FALSE(r.is_identity());
  expect_near_vec(r.v, DenseVector{-1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}, 1e-15);
}

TEST(MakeReflection, RejectsNonUnitInput) {
  try {
    (void)make_reflection(DenseVector{0, 2});
    FAIL() << "expected error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unnormalized_direction);
    EXPECT_STREQ(e.what(), "unnormalized direction");
  }
}

TEST(Reflect, Examples) {
  expect_near_vec(reflect(Reflection{}, DenseVector{7, -3}), DenseVector{7, -3}, 0);
  const auto r = make_reflection(DenseVector{0, 1});
  expect_near_vec(reflect(r, DenseVector{1, 0}), DenseVector{0, 1}, 1e-15);
}

TEST(Reflect, DimensionMismatchThrows) {
  const auto r = make_reflection(DenseVector{0, 1});
  EXPECT_THROW((void)reflect(r, DenseVector{1, 2, 3}), Error);
}

TEST(ReflectionProperties, AlignmentInvolutionIsometry) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 14;
    const auto u = random_unit(n, rng);
    const auto spec = make_reflection(u);
    DenseVector e1(n, 0.0);
    e1[0] = 1;
    expect_near_vec(reflect(spec, e1), u, 1e-12);

    DenseVector x(n), y(n);
    for (auto& c : x) c = 10 * g(rng);
    for (auto& c : y) c = 10 * g(rng);
    expect_near_vec(reflect(spec, reflect(spec, x)), x, 1e-12);
    EXPECT_NEAR(std::sqrt(squared_distance(reflect(spec, x), reflect(spec, y))), std::sqrt(squared_distance(x, y)),
                1e-12 * std::max(1.0, norm(x) + norm(y)));
  }
}

TEST(ReflectSet, IdentityLeavesInputUnchanged) {
  const auto set = to_set({{1, 2}, {3, 4}});
  EXPECT_EQ(reflect_set(Reflection{}, set), set);
}

TEST(ReflectSet, ColumnwiseDefinition) {
  const auto set = to_set({{1, 0}, {2, 5}});
  const auto r = make_reflection(DenseVector{0, 1});
  const auto out = reflect_set(r, set);
  for (std::size_t i = 0; i < set.size(); ++i) expect_near_vec(out[i], reflect(r, set[i]), 0);
}

TEST(ReflectSet, PreservesPairwiseDistances) {
  std::mt19937_64 rng(8);
  const auto pts = oracle::random_points(50, 12, 9, 3.0);
  const auto set = to_set(pts);
  const auto out = reflect_set(make_reflection(random_unit(12, rng)), set);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      EXPECT_NEAR(std::sqrt(oracle::sq_dist(pts[i], pts[j])), std::sqrt(squared_distance(out[i], out[j])), 1e-12);
    }
  }
}

TEST(ReflectSet, CommutesWithCentroid) {
  std::mt19937_64 rng(10);
  const auto set = to_set(oracle::random_points(80, 6, 4));
  const auto r = make_reflection(random_unit(6, rng));
  expect_near_vec(centroid(reflect_set(r, set)), reflect(r, centroid(set)), 1e-12);
}

}  // namespace
}  // namespace nohis
