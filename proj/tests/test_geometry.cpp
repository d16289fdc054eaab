#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "mesharc/geometry.hpp"

using namespace mesharc;

TEST(Geometry, UniformGridSizes) {
  const auto sq = RectDomain::square();
  EXPECT_EQ(uniform_grid(sq, 5).size(), 25u);
  EXPECT_EQ(uniform_grid(sq, 9).size(), 81u);
  EXPECT_EQ(uniform_grid(sq, 17).size(), 289u);
  EXPECT_EQ(uniform_grid(sq, 33).size(), 1089u);
  EXPECT_EQ(uniform_grid(sq, 65).size(), 4225u);
  const auto corners = uniform_grid(sq, 2);
  std::set<std::pair<double, double>> c;
  for (const auto& p : corners.points) c.insert({p.x, p.y});
  EXPECT_EQ(c, (std::set<std::pair<double, double>>{{-1, -1}, {-1, 1}, {1, -1}, {1, 1}}));
}

TEST(Geometry, FillDistance) {
  const auto sq = RectDomain::square();
  EXPECT_NEAR(fill_distance(uniform_grid(sq, 5), sq), std::sqrt(2.0) / 4, 1e-15);
  EXPECT_NEAR(fill_distance(uniform_grid(sq, 9), sq), std::sqrt(2.0) / 8, 1e-15);
  PointSet centre;
  centre.points = {{0.0, 0.0}};
  EXPECT_NEAR(fill_distance(centre, sq), std::sqrt(2.0), sq.diagonal() / 512);
  // probe estimate agrees with the analytic grid value
  PointSet g = uniform_grid(sq, 5);
  g.grid_m.reset();
  EXPECT_NEAR(fill_distance(g, sq), std::sqrt(2.0) / 4, sq.diagonal() / 512);
}

TEST(Geometry, FillDistanceMonotoneUnderRefinement) {
  const auto sq = RectDomain::square();
  double prev = 1e9;
  for (int m : {3, 5, 9, 17}) {
    PointSet X = uniform_grid(sq, m);
    X.grid_m.reset();
    const double h = fill_distance(X, sq);
    EXPECT_LE(h, prev);
    prev = h;
  }
}

TEST(Geometry, SeparationRadius) {
  const auto sq = RectDomain::square();
  EXPECT_DOUBLE_EQ(separation_radius(uniform_grid(sq, 5)), 0.25);
  PointSet two;
  two.points = {{0, 0}, {1, 0}};
  EXPECT_DOUBLE_EQ(separation_radius(two), 0.5);

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  PointSet X;
  for (int i = 0; i < 100; ++i) X.points.push_back({u(rng), u(rng)});
  double best = 1e300;
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = i + 1; j < X.size(); ++j) best = std::min(best, distance(X[i], X[j]));
  EXPECT_NEAR(separation_radius(X), 0.5 * best, 1e-12);
}

TEST(Geometry, NeighborPairsTrivialCases) {
  const auto sq = RectDomain::square();
  const auto X = uniform_grid(sq, 5);
  const auto diag = neighbor_pairs(X, X, 0.4);
  ASSERT_EQ(diag.size(), X.size());
  for (const auto& [i, j] : diag) EXPECT_EQ(i, j);
  EXPECT_EQ(neighbor_pairs(X, X, std::numeric_limits<double>::infinity()).size(), 625u);
}

TEST(Geometry, NeighborSearchMatchesBruteForce) {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 5; ++trial) {
    PointSet X, Y;
    for (int i = 0; i < 150; ++i) X.points.push_back({u(rng), u(rng)});
    for (int i = 0; i < 120; ++i) Y.points.push_back({u(rng), u(rng)});
    for (double cutoff : {0.01, 0.1, 0.5, 2.0, 4.0}) {
      std::vector<std::pair<std::size_t, std::size_t>> brute;
      for (std::size_t i = 0; i < X.size(); ++i)
        for (std::size_t j = 0; j < Y.size(); ++j)
          if (distance(X[i], Y[j]) < cutoff) brute.push_back({i, j});
      EXPECT_EQ(neighbor_pairs(X, Y, cutoff), brute);
    }
  }
}

TEST(Geometry, NeighborPairsSymmetricOnSelf) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-1, 1);
  PointSet X;
  for (int i = 0; i < 200; ++i) X.points.push_back({u(rng), u(rng)});
  const auto pairs = neighbor_pairs(X, X, 0.3);
  std::set<std::pair<std::size_t, std::size_t>> s(pairs.begin(), pairs.end());
  for (const auto& [i, j] : pairs) EXPECT_TRUE(s.count({j, i}));
}

TEST(Geometry, BucketGridQuery) {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Point> pts;
  for (int i = 0; i < 300; ++i) pts.push_back({u(rng), u(rng)});
  const BucketGrid grid(pts, 0.2);
  for (int t = 0; t < 50; ++t) {
    const Point p{1.5 * u(rng), 1.5 * u(rng)};
    std::vector<std::size_t> got, want;
    grid.query(p, 0.2, got);
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (distance(p, pts[j]) < 0.2) want.push_back(j);
    EXPECT_EQ(got, want);
  }
}

TEST(Geometry, TableOneScheduleRatios) {
  const auto s = schedule_from_grids(RectDomain::square(), {5, 9, 17, 33, 65},
                                     {2, 1, 0.5, 0.25, 0.125}, 0.5, 1.0);
  EXPECT_TRUE(s.ratio_warnings().empty());
  const auto bad = schedule_from_grids(RectDomain::square(), {5, 17}, {2, 0.5}, 0.5, 1.0);
  EXPECT_EQ(bad.ratio_warnings().size(), 1u);
}

TEST(Geometry, GeneratedSchedule) {
  const auto s = schedule_generated(RectDomain::square(), 5, 4, 4.0);
  ASSERT_EQ(s.size(), 4u);
  const int m[] = {5, 9, 17, 33};
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(s[i].centres.size(), static_cast<std::size_t>(m[i] * m[i]));
    EXPECT_NEAR(s[i].delta, 4.0 * s[i].h, 1e-9 * s[i].delta);
  }
  EXPECT_TRUE(s.ratio_warnings().empty());
}

TEST(Geometry, CoincidentMask) {
  const auto sq = RectDomain::square();
  const auto a = uniform_grid(sq, 3), b = uniform_grid(sq, 5);
  const auto mask = coincident_mask(b, {&a});
  EXPECT_EQ(std::count(mask.begin(), mask.end(), true), 9);
  PointSet shifted;
  shifted.points = {{0.5 + 1e-13, 0.0}, {0.5 + 1e-9, 0.5}};
  const auto m2 = coincident_mask(shifted, {&b});
  EXPECT_TRUE(m2[0]);
  EXPECT_FALSE(m2[1]);
}

TEST(Geometry, PointsCsvRoundTrip) {
  const auto X = uniform_grid(RectDomain::square(), 4);
  std::stringstream ss;
  write_points_csv(ss, X);
  const auto Y = read_points_csv(ss);
  EXPECT_EQ(X.points, Y.points);
}
