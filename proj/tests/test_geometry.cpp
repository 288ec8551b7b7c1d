#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "optrrt/geometry.hpp"

using namespace optrrt;

namespace {

void expect_point_near(const Point& actual, const Point& expected, double tol = 1e-12) {
  ASSERT_EQ(actual.dimension(), expected.dimension());
  for (std::size_t k = 0; k < actual.dimension(); ++k) EXPECT_NEAR(actual[k], expected[k], tol) << "axis " << k;
}

Point random_point(std::mt19937_64& rng, std::size_t d, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> c(d);
  for (auto& v : c) v = u(rng);
  return Point(std::move(c));
}

}  // namespace

TEST(Steer, MovesEtaAlongUnitDirection) {
  expect_point_near(steer({0, 0}, {3, 4}, 1.0), {0.6, 0.8});
}

TEST(Steer, ZeroDisplacement) { EXPECT_EQ(steer({1, 1}, {1, 1}, 0.5), Point({1, 1})); }

TEST(Steer, TargetWithinEtaReturnedExactly) { EXPECT_EQ(steer({0, 0}, {0.3, 0}, 1.0), Point({0.3, 0})); }

TEST(Steer, RejectsBadInput) {
  EXPECT_THROW(steer({0, 0}, {1, 0, 0}, 1.0), UsageError);
  EXPECT_THROW(steer({0, 0}, {1, 0}, 0.0), UsageError);
}

TEST(Steer, Properties) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> eta_dist(0.01, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t d = 2 + i % 3;
    const Point x = random_point(rng, d, -5, 5);
    const Point y = random_point(rng, d, -5, 5);
    const double eta = eta_dist(rng);
    const Point z = steer(x, y, eta);
    const double xy = distance(x, y);
    // Step length is min(eta, |y - x|) and z never moves away from y.
    EXPECT_NEAR(distance(x, z), std::min(eta, xy), 1e-12);
    EXPECT_LE(distance(z, y), xy + 1e-12);
    // z lies on [x, y]: |x - z| + |z - y| = |x - y|.
    EXPECT_NEAR(distance(x, z) + distance(z, y), xy, 1e-12);
    expect_point_near(steer(x, z, eta), z);
  }
}

TEST(Line, Lengths) {
  EXPECT_DOUBLE_EQ(path_length(line({0, 0}, {1, 0})), 1.0);
  EXPECT_EQ(line({0, 0}, {1, 0}).waypoints().size(), 2u);
  const Polyline zero = line({0, 0}, {0, 0});
  EXPECT_TRUE(zero.degenerate());
  EXPECT_DOUBLE_EQ(path_length(zero), 0.0);
  EXPECT_DOUBLE_EQ(path_length(line({1, 2}, {4, 6})), 5.0);
}

TEST(Concat, JoinsAtSharedEndpoint) {
  const Polyline p = concat(Polyline({{0, 0}, {1, 0}}), Polyline({{1, 0}, {1, 1}}));
  ASSERT_EQ(p.waypoints().size(), 3u);
  EXPECT_EQ(p.waypoints()[2], Point({1, 1}));
  EXPECT_DOUBLE_EQ(path_length(p), 2.0);
}

TEST(Concat, DegenerateIsIdentity) {
  const Polyline p({{0, 0}, {1, 0}, {1, 2}});
  const Polyline q = concat(p, Polyline({{1, 2}}));
  EXPECT_EQ(q.waypoints(), p.waypoints());
}

TEST(Concat, ThreeUnitSegments) {
  const Polyline p = concat(concat(line({0, 0}, {1, 0}), line({1, 0}, {1, 1})), line({1, 1}, {0, 1}));
  EXPECT_DOUBLE_EQ(path_length(p), 3.0);
}

TEST(Concat, MismatchedEndpointsThrow) {
  EXPECT_THROW(concat(line({0, 0}, {1, 0}), line({1, 0.1}, {2, 0})), UsageError);
}

TEST(PathLength, SinglePointAndSquare) {
  EXPECT_DOUBLE_EQ(path_length(Polyline({{3, 3}})), 0.0);
  EXPECT_DOUBLE_EQ(path_length(Polyline({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}})), 4.0);
}

TEST(PathLength, MatchesIndependentResummation) {
  std::mt19937_64 rng(99);
  std::vector<Point> w;
  for (int i = 0; i < 100; ++i) w.push_back(random_point(rng, 3, -10, 10));
  const Polyline p(w);
  // Independent recomputation: explicit coordinate arithmetic, summed backwards.
  long double expected = 0.0L;
  for (std::size_t i = w.size() - 1; i > 0; --i) {
    long double sq = 0.0L;
    for (std::size_t k = 0; k < 3; ++k) {
      const long double diff = static_cast<long double>(w[i][k]) - w[i - 1][k];
      sq += diff * diff;
    }
    expected += std::sqrt(sq);
  }
  EXPECT_NEAR(path_length(p), static_cast<double>(expected), 1e-12 * static_cast<double>(expected));
}

TEST(PathLength, ConcatenationIsAdditive) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Point> a;
    std::vector<Point> b;
    for (int i = 0; i < 5; ++i) a.push_back(random_point(rng, 2, 0, 1));
    b.push_back(a.back());
    for (int i = 0; i < 4; ++i) b.push_back(random_point(rng, 2, 0, 1));
    const Polyline p1(a);
    const Polyline p2(b);
    const double joined = path_length(concat(p1, p2));
    EXPECT_NEAR(joined, path_length(p1) + path_length(p2), 1e-12 * joined);
  }
}

TEST(Point, RejectsNonFinite) { EXPECT_THROW(Point({0.0, std::nan("")}), UsageError); }
