#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "tdanet/landscape.hpp"
#include "tdanet/rng.hpp"

using namespace tdanet;

#define CHECK_NEAR(a, b, tol) CHECK(std::abs((a) - (b)) <= (tol))

namespace {

PersistenceDiagram diagram(std::vector<Pair> pairs, int dim = 1) {
  PersistenceDiagram pd;
  pd.finite[dim] = std::move(pairs);
  pd.sort_pairs();
  return pd;
}

std::vector<Pair> random_pairs(Rng& rng, int max_points) {
  int n = 1 + static_cast<int>(rng.integer(max_points));
  std::vector<Pair> out;
  for (int i = 0; i < n; ++i) {
    double b = rng.uniform();
    out.push_back({b, b + rng.uniform()});
  }
  return out;
}

double kth_largest_tent(const std::vector<Pair>& pairs, int k, double t) {
  std::vector<double> vals;
  for (const Pair& p : pairs) vals.push_back(std::max(0.0, std::min(t - p.birth, p.death - t)));
  std::sort(vals.begin(), vals.end(), std::greater<>());
  return k < static_cast<int>(vals.size()) ? vals[k] : 0.0;
}

}  // namespace

TEST_CASE("a single pair produces one isosceles tent") {
  PersistenceLandscape l = landscape_from_diagram(diagram({{0.0, 2.0}}), 1);
  REQUIRE(l.level_count() == 1);
  CHECK(l.value(0, 1.0) == 1.0);
  CHECK(l.value(0, 0.5) == 0.5);
  CHECK(l.value(0, 1.5) == 0.5);
  CHECK(l.value(0, 0.0) == 0.0);
  CHECK(l.value(0, 2.0) == 0.0);
  CHECK(l.value(0, -1.0) == 0.0);
  CHECK(l.value(0, 3.0) == 0.0);
  CHECK(l.value(1, 1.0) == 0.0);

  CHECK_NEAR(lp_norm(l, 2.0), std::sqrt(2.0 / 3.0), 1e-12);
  CHECK_NEAR(lp_norm(l, 1.0), 1.0, 1e-12);
  CHECK(lp_norm(l, kInf) == 1.0);
}

TEST_CASE("two overlapping pairs give the textbook two-level landscape") {
  PersistenceLandscape l = landscape_from_diagram(diagram({{0.0, 2.0}, {1.0, 3.0}}), 1);
  REQUIRE(l.level_count() == 2);
  CHECK(l.value(0, 1.0) == 1.0);
  CHECK(l.value(0, 2.0) == 1.0);
  CHECK(l.value(0, 1.5) == 0.5);
  CHECK(l.value(1, 1.5) == 0.5);
  CHECK(l.value(1, 1.0) == 0.0);
  CHECK(l.value(1, 2.0) == 0.0);
  CHECK(l.value(1, 1.25) == 0.25);
  CHECK(l.value(1, 0.5) == 0.0);
}

TEST_CASE("pointwise values equal the k-th largest tent exactly") {
  Rng rng(606);
  int probes = 0;
  while (probes < 1000) {
    std::vector<Pair> pairs = random_pairs(rng, 8);
    PersistenceLandscape l = landscape_from_diagram(diagram(pairs), 1);
    for (int rep = 0; rep < 10; ++rep, ++probes) {
      double t = 3.0 * rng.uniform() - 0.5;
      for (int k = 0; k < static_cast<int>(pairs.size()); ++k)
        REQUIRE(l.value(k, t) == kth_largest_tent(pairs, k, t));
    }
  }
}

TEST_CASE("breakpoint values are stored exactly as evaluated") {
  Rng rng(607);
  for (int trial = 0; trial < 20; ++trial) {
    PersistenceLandscape l = landscape_from_diagram(diagram(random_pairs(rng, 6)), 1);
    for (int k = 0; k < l.level_count(); ++k)
      for (const auto& [t, v] : l.levels[k]) REQUIRE(l.value(k, t) == v);
  }
}

TEST_CASE("levels are ordered and 1-Lipschitz") {
  Rng rng(608);
  for (int trial = 0; trial < 50; ++trial) {
    PersistenceLandscape l = landscape_from_diagram(diagram(random_pairs(rng, 8)), 1);
    for (int rep = 0; rep < 50; ++rep) {
      double s = 3.0 * rng.uniform() - 0.5;
      double t = 3.0 * rng.uniform() - 0.5;
      for (int k = 0; k + 1 < l.level_count(); ++k)
        CHECK(l.value(k, t) >= l.value(k + 1, t));
      for (int k = 0; k < l.level_count(); ++k)
        CHECK(std::abs(l.value(k, s) - l.value(k, t)) <= std::abs(s - t) + 1e-12);
    }
  }
}

TEST_CASE("construction commutes with diagram shifts") {
  Rng rng(609);
  std::vector<Pair> pairs = random_pairs(rng, 6);
  const double c = 0.775;
  std::vector<Pair> shifted;
  for (const Pair& p : pairs) shifted.push_back({p.birth + c, p.death + c});

  PersistenceLandscape l0 = landscape_from_diagram(diagram(pairs), 1);
  PersistenceLandscape l1 = landscape_from_diagram(diagram(shifted), 1);
  REQUIRE(l0.level_count() == l1.level_count());
  for (int k = 0; k < l0.level_count(); ++k)
    for (int rep = 0; rep < 100; ++rep) {
      double t = 3.0 * rng.uniform() - 0.5;
      CHECK_NEAR(l0.value(k, t), l1.value(k, t + c), 1e-12);
    }
}

TEST_CASE("grid evaluation interpolates linearly") {
  PersistenceLandscape l = landscape_from_diagram(diagram({{0.0, 2.0}}), 1);
  Eigen::MatrixXd m = evaluate(l, GridSpec{0.0, 2.0, 5});
  REQUIRE(m.rows() == 1);
  REQUIRE(m.cols() == 5);
  CHECK(m(0, 0) == 0.0);
  CHECK(m(0, 1) == 0.5);
  CHECK(m(0, 2) == 1.0);
  CHECK(m(0, 3) == 0.5);
  CHECK(m(0, 4) == 0.0);

  PersistenceLandscape zero;
  Eigen::MatrixXd z = evaluate(zero, GridSpec{0.0, 1.0, 4}, 2);
  CHECK(z.rows() == 2);
  CHECK(z.isZero(0.0));
}

TEST_CASE("mean landscape is the pointwise average") {
  GridSpec grid{0.0, 3.0, 64};
  PersistenceLandscape l = landscape_from_diagram(diagram({{0.0, 2.0}, {1.0, 3.0}}), 1);
  PersistenceLandscape zero;
  zero.homology_dim = 1;

  PersistenceLandscape self = mean_landscape({l}, grid);
  PersistenceLandscape half = mean_landscape({l, zero}, grid);
  for (int i = 0; i < grid.n; ++i) {
    double t = grid.point(i);
    for (int k = 0; k < 2; ++k) {
      CHECK(self.value(k, t) == l.value(k, t));
      CHECK(half.value(k, t) == l.value(k, t) / 2.0);
    }
  }
  CHECK(self.grid.has_value());
  CHECK(self.level_count() == 2);
}

TEST_CASE("means of larger batches are closer together") {
  GridSpec grid{0.0, 2.5, 256};
  Rng rng(610);
  auto draw = [&](int n) {
    std::vector<PersistenceLandscape> ls;
    for (int i = 0; i < n; ++i) ls.push_back(landscape_from_diagram(diagram(random_pairs(rng, 5)), 1));
    return mean_landscape(ls, grid);
  };
  auto sup_dist = [&](const PersistenceLandscape& a, const PersistenceLandscape& b) {
    int K = std::max(a.level_count(), b.level_count());
    double m = 0.0;
    for (int k = 0; k < K; ++k)
      for (int i = 0; i < grid.n; ++i)
        m = std::max(m, std::abs(a.value(k, grid.point(i)) - b.value(k, grid.point(i))));
    return m;
  };

  double d8 = 0.0, d64 = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    d8 += sup_dist(draw(8), draw(8));
    d64 += sup_dist(draw(64), draw(64));
  }
  CHECK(d64 < d8);
}

TEST_CASE("grid-backed norms converge to the exact ones") {
  Rng rng(611);
  for (int trial = 0; trial < 5; ++trial) {
    PersistenceLandscape l = landscape_from_diagram(diagram(random_pairs(rng, 6)), 1);
    PersistenceLandscape g = mean_landscape({l}, GridSpec{-0.5, 3.0, 4096});
    for (double p : {1.0, 2.0}) {
      double exact = lp_norm(l, p);
      double approx = lp_norm(g, p);
      REQUIRE(exact > 0.0);
      CHECK(std::abs(approx - exact) / exact < 1e-3);
    }
  }
}

TEST_CASE("difference landscapes feed the norms") {
  GridSpec grid{0.0, 3.0, 512};
  PersistenceLandscape a = landscape_from_diagram(diagram({{0.0, 2.0}}), 1);
  PersistenceLandscape b = landscape_from_diagram(diagram({{1.0, 3.0}}), 1);
  PersistenceLandscape zero_diff = subtract(a, a, grid);
  CHECK(lp_norm(zero_diff, 2.0) == 0.0);
  CHECK(lp_norm(zero_diff, kInf) == 0.0);

  PersistenceLandscape d = subtract(a, b, grid);
  CHECK(lp_norm(d, kInf) > 0.9);  // tents displaced by 1, peaks differ by ~1
  CHECK(lp_norm(d, 2.0) > 0.0);
}

TEST_CASE("unbounded classes enter only through an explicit cap") {
  PersistenceDiagram pd;
  pd.infinite[1] = {0.3};
  PersistenceLandscape dropped = landscape_from_diagram(pd, 1);
  CHECK(dropped.level_count() == 0);
  CHECK(lp_norm(dropped, 2.0) == 0.0);

  PersistenceLandscape capped = landscape_from_diagram(pd, 1, 16, 1.0);
  REQUIRE(capped.level_count() == 1);
  CHECK(capped.value(0, 0.65) == 0.35);
}

TEST_CASE("landscape interface rejects bad arguments") {
  PersistenceLandscape l = landscape_from_diagram(diagram({{0.0, 1.0}}), 1);
  CHECK_THROWS_AS(landscape_from_diagram(PersistenceDiagram{}, 3), config_error);
  CHECK_THROWS_AS(landscape_from_diagram(PersistenceDiagram{}, 1, 0), config_error);
  CHECK_THROWS_AS(evaluate(l, GridSpec{1.0, 1.0, 8}), config_error);
  CHECK_THROWS_AS(evaluate(l, GridSpec{0.0, 1.0, 1}), config_error);
  CHECK_THROWS_AS(mean_landscape({}, GridSpec{}), config_error);
  CHECK_THROWS_AS(lp_norm(l, 3.0), config_error);
}
