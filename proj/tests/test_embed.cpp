#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "tdanet/embed.hpp"
#include "tdanet/homology.hpp"
#include "tdanet/rng.hpp"

using namespace tdanet;

namespace {

std::vector<double> random_series(Rng& rng, int T) {
  std::vector<double> v(T);
  for (double& x : v) x = rng.uniform();
  return v;
}

}  // namespace

TEST_CASE("delay embedding transcribes lagged copies") {
  PointCloud c = delay_embed({1.0, 2.0, 3.0}, 2, 1);
  REQUIRE(c.points.rows() == 2);
  REQUIRE(c.points.cols() == 2);
  CHECK(c.points(0, 0) == 2.0);
  CHECK(c.points(0, 1) == 1.0);
  CHECK(c.points(1, 0) == 3.0);
  CHECK(c.points(1, 1) == 2.0);

  PointCloud d = delay_embed({0, 1, 2, 3, 4, 5, 6, 7}, 3, 2);
  REQUIRE(d.points.rows() == 4);  // T - (m-1)*lag = 8 - 4
  CHECK(d.points(0, 0) == 4.0);
  CHECK(d.points(0, 1) == 2.0);
  CHECK(d.points(0, 2) == 0.0);
}

TEST_CASE("constant series embeds to a degenerate cloud with empty H1") {
  std::vector<double> flat(10, 1.25);
  PointCloud c = delay_embed(flat, 2, 1);
  for (long i = 0; i < c.points.rows(); ++i) {
    CHECK(c.points(i, 0) == 1.25);
    CHECK(c.points(i, 1) == 1.25);
  }
  PersistenceDiagram pd = persistence(rips_filtration(cloud_distances(c), 2));
  CHECK(pd.finite[1].empty());
  CHECK(pd.finite[0].empty());  // all merges happen at scale zero
}

TEST_CASE("embedding rejects bad parameters and short input") {
  CHECK_THROWS_AS(delay_embed({1, 2, 3}, 1, 1), config_error);
  CHECK_THROWS_AS(delay_embed({1, 2, 3}, 2, 0), config_error);
  CHECK_THROWS_AS(delay_embed({1, 2, 3, 4}, 2, 4), data_error);
  CHECK_NOTHROW(delay_embed({1, 2, 3, 4, 5}, 3, 2));
}

TEST_CASE("cloud distances are Euclidean and symmetric") {
  PointCloud single;
  single.points = Eigen::MatrixXd::Zero(1, 2);
  DistanceMatrix D1 = cloud_distances(single);
  CHECK(D1.values(0, 0) == 0.0);

  PointCloud square;
  square.points = Eigen::MatrixXd(4, 2);
  square.points << 0, 0, 1, 0, 1, 1, 0, 1;
  DistanceMatrix D = cloud_distances(square);
  CHECK(D.values(0, 1) == 1.0);
  CHECK(D.values(1, 2) == 1.0);
  CHECK(D.values(0, 2) == std::sqrt(2.0));
  CHECK(D.values(1, 3) == std::sqrt(2.0));

  Rng rng(31);
  PointCloud c;
  c.points = Eigen::MatrixXd(20, 3);
  for (long i = 0; i < 20; ++i)
    for (int j = 0; j < 3; ++j) c.points(i, j) = rng.gaussian();
  DistanceMatrix R = cloud_distances(c);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      CHECK(R.values(i, j) == R.values(j, i));
      for (int k = 0; k < 20; ++k)
        CHECK(R.values(i, j) <= R.values(i, k) + R.values(k, j) + 1e-12);
    }
}

TEST_CASE("moving average: identity window, constant invariance") {
  std::vector<double> v = {5.0, -1.0, 2.5, 0.0, 3.25};
  SmoothedSeries s1 = smooth(v, 1);
  CHECK(s1.values == v);

  std::vector<double> flat(50, 2.5);
  CHECK(smooth(flat, 21).values == flat);

  CHECK_THROWS_AS(smooth(v, 2), config_error);
  CHECK_THROWS_AS(smooth(v, 0), config_error);
  CHECK_THROWS_AS(smooth(v, 7), data_error);
}

TEST_CASE("moving average window truncates at the edges") {
  std::vector<double> v = {1.0, 2.0, 3.0, 4.0, 5.0};
  SmoothedSeries s = smooth(v, 3);
  CHECK(s.values[0] == (1.0 + 2.0) / 2.0);
  CHECK(s.values[1] == (1.0 + 2.0 + 3.0) / 3.0);
  CHECK(s.values[4] == (4.0 + 5.0) / 2.0);
}

TEST_CASE("smoothing recovers a slow mean under fast noise") {
  const long T = 512;
  double mse_raw = 0.0, mse_smooth = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    std::vector<double> mu(T), y(T);
    double ar = 0.0;
    for (long t = 0; t < T; ++t) {
      mu[t] = std::sin(2.0 * M_PI * t / 200.0);
      ar = -0.95 * ar + rng.gaussian();
      y[t] = mu[t] + ar;
    }
    SmoothedSeries s = smooth(y, 21);
    for (long t = 0; t < T; ++t) {
      mse_raw += (y[t] - mu[t]) * (y[t] - mu[t]);
      mse_smooth += (s.values[t] - mu[t]) * (s.values[t] - mu[t]);
    }
  }
  CHECK(mse_smooth * 5.0 <= mse_raw);
}

TEST_CASE("W-shaped series yields the textbook two bars") {
  SmoothedSeries s;
  s.values = {3.0, 0.0, 2.0, 1.0, 3.0};
  PersistenceDiagram pd = sublevel_persistence(s);
  REQUIRE(pd.finite[0].size() == 1);
  CHECK(pd.finite[0][0].birth == 1.0);
  CHECK(pd.finite[0][0].death == 2.0);
  REQUIRE(pd.infinite[0].size() == 1);
  CHECK(pd.infinite[0][0] == 0.0);
}

TEST_CASE("monotone series has a single unbounded bar") {
  SmoothedSeries s;
  s.values = {-2.0, -1.0, 0.5, 3.0, 7.0};
  PersistenceDiagram pd = sublevel_persistence(s);
  CHECK(pd.finite[0].empty());
  REQUIRE(pd.infinite[0].size() == 1);
  CHECK(pd.infinite[0][0] == -2.0);
}

TEST_CASE("bar count equals local minima; components match the sweep oracle") {
  Rng rng(2718);
  for (int trial = 0; trial < 20; ++trial) {
    SmoothedSeries s;
    s.values = random_series(rng, 200);
    PersistenceDiagram pd = sublevel_persistence(s);

    long bars = static_cast<long>(pd.finite[0].size() + pd.infinite[0].size());
    CHECK(bars == oracle::local_min_count(s.values));
    for (const Pair& p : pd.finite[0]) CHECK(p.death > p.birth);

    BettiCurve curve = betti_curve(pd);
    for (long i = 0; i < 200; i += 7) {
      double a = s.values[i];
      CHECK(curve.dims[0].at(a) == oracle::sublevel_components(s.values, a, i));
    }
  }
}

TEST_CASE("tie-heavy series: zero bars drop but component counts stay exact") {
  // With exact ties a minimum can merge away at its own value; such bars have
  // zero persistence and are dropped, so only an upper bound ties bar count
  // to minima. The per-threshold component count remains exact.
  Rng rng(999);
  for (int trial = 0; trial < 20; ++trial) {
    SmoothedSeries s;
    s.values.resize(100);
    for (double& x : s.values) x = static_cast<double>(rng.integer(5));
    PersistenceDiagram pd = sublevel_persistence(s);

    long bars = static_cast<long>(pd.finite[0].size() + pd.infinite[0].size());
    CHECK(bars <= oracle::local_min_count(s.values));
    for (const Pair& p : pd.finite[0]) CHECK(p.death > p.birth);

    BettiCurve curve = betti_curve(pd);
    for (double a : {0.0, 1.0, 2.0, 3.0, 4.0})
      CHECK(curve.dims[0].at(a) ==
            oracle::sublevel_components(s.values, a, static_cast<long>(s.values.size())));
  }
}

TEST_CASE("sublevel diagrams move at most as far as the series") {
  Rng rng(171);
  const double delta = 0.01;
  for (int trial = 0; trial < 50; ++trial) {
    SmoothedSeries a, b;
    a.values = random_series(rng, 40);
    b.values = a.values;
    for (double& x : b.values) x += (2.0 * rng.uniform() - 1.0) * delta;
    PersistenceDiagram pa = sublevel_persistence(a);
    PersistenceDiagram pb = sublevel_persistence(b);
    CHECK(bottleneck(pa, pb, 0) <= delta + 1e-12);
  }
}

TEST_CASE("periodic series embed to a circle with one dominant loop") {
  const long T = 512;
  std::vector<double> y(T);
  for (long t = 0; t < T; ++t) y[t] = std::sin(2.0 * M_PI * t / 64.0);
  PointCloud full = delay_embed(y, 2, 16);

  PointCloud sub;
  sub.points = full.points.topRows(64);
  PersistenceDiagram pd = persistence(rips_filtration(cloud_distances(sub), 2));
  REQUIRE(!pd.finite[1].empty());
  std::vector<double> pers;
  for (const Pair& p : pd.finite[1]) pers.push_back(p.persistence());
  std::sort(pers.begin(), pers.end(), std::greater<>());
  if (pers.size() > 1) CHECK(pers[0] >= 5.0 * pers[1]);
  CHECK(pers[0] > 1.0);  // the circle's loop lives for a macroscopic range

  // Cross-check a coarser subsample against the dense Z/2 rank oracle.
  PointCloud coarse;
  coarse.points = Eigen::MatrixXd(16, 2);
  for (int i = 0; i < 16; ++i) coarse.points.row(i) = full.points.row(4 * i);
  DistanceMatrix D = cloud_distances(coarse);
  PersistenceDiagram cpd = persistence(rips_filtration(D, 2));
  REQUIRE(cpd.finite [1].size() >= 1);
  const Pair loop = cpd.finite[1].front();
  double mid = (loop.birth + loop.death) / 2.0;
  CHECK(betti_curve(cpd).dims[1].at(mid) == oracle::betti_at(D, mid, 1, 2));
  CHECK(oracle::betti_at(D, mid, 1, 2) == 1);
}
