#include "tdanet/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace tdanet {

namespace {

double tent(const Pair& p, double t) {
  return std::max(0.0, std::min(t - p.birth, p.death - t));
}

bool is_inf(double p) { return std::isinf(p); }

double polyline_at(const std::vector<std::pair<double, double>>& pts, double t) {
  if (pts.empty()) return 0.0;
  if (t <= pts.front().first) return t == pts.front().first ? pts.front().second : 0.0;
  if (t >= pts.back().first) return t == pts.back().first ? pts.back().second : 0.0;
  auto it = std::upper_bound(pts.begin(), pts.end(), t,
                             [](double x, const std::pair<double, double>& q) { return x < q.first; });
  const auto& [t1, v1] = *it;
  const auto& [t0, v0] = *(it - 1);
  if (t1 == t0) return v0;
  double w = (t - t0) / (t1 - t0);
  return v0 + w * (v1 - v0);
}

}  // namespace

double PersistenceLandscape::value(int level, double t) const {
  if (level < 0 || level >= level_count()) return 0.0;
  if (!pairs.empty() && !grid) {
    std::vector<double> vals(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) vals[i] = tent(pairs[i], t);
    std::sort(vals.begin(), vals.end(), std::greater<>());
    return vals[level];
  }
  return polyline_at(levels[level], t);
}

PersistenceLandscape landscape_from_diagram(const PersistenceDiagram& pd, int dim, int max_levels,
                                            std::optional<double> infinite_cap) {
  if (dim < 0 || dim > 2) throw config_error("landscape: dim must be 0, 1 or 2");
  if (max_levels < 1) throw config_error("landscape: max_levels must be positive");

  std::vector<Pair> pairs = pd.finite[dim];
  if (infinite_cap) {
    for (double b : pd.infinite[dim])
      if (b < *infinite_cap) pairs.push_back({b, *infinite_cap});
  }

  PersistenceLandscape l;
  l.homology_dim = dim;
  if (pairs.empty()) return l;

  // Between consecutive candidate abscissas the pointwise order of the tent
  // functions is constant (tents only cross at births, deaths and pairwise
  // midpoints), so sampling the k-th largest at every candidate is exact.
  std::vector<double> ts;
  for (const Pair& p : pairs) {
    ts.push_back(p.birth);
    ts.push_back(p.death);
  }
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      double mid = (pairs[i].birth + pairs[j].death) / 2.0;
      if (tent(pairs[i], mid) > 0.0 && tent(pairs[j], mid) > 0.0) ts.push_back(mid);
    }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  const int K = std::min<int>(max_levels, static_cast<int>(pairs.size()));
  std::vector<std::vector<std::pair<double, double>>> levels(K);
  std::vector<double> vals(pairs.size());
  for (double t : ts) {
    for (std::size_t i = 0; i < pairs.size(); ++i) vals[i] = tent(pairs[i], t);
    std::sort(vals.begin(), vals.end(), std::greater<>());
    for (int k = 0; k < K; ++k) levels[k].emplace_back(t, vals[k]);
  }

  // Drop breakpoints outside each level's support (keeping one zero on each
  // side) and drop trailing all-zero levels.
  for (auto& pts : levels) {
    auto nz = [](const std::pair<double, double>& q) { return q.second != 0.0; };
    auto first = std::find_if(pts.begin(), pts.end(), nz);
    auto last = std::find_if(pts.rbegin(), pts.rend(), nz);
    if (first == pts.end()) {
      pts.clear();
      continue;
    }
    auto lo = first == pts.begin() ? pts.begin() : first - 1;
    auto hi = last == pts.rbegin() ? pts.end() : (last.base() + 1);
    pts = std::vector<std::pair<double, double>>(lo, hi);
  }
  while (!levels.empty() && levels.back().empty()) levels.pop_back();
  l.levels = std::move(levels);
  l.pairs = std::move(pairs);
  return l;
}

Eigen::MatrixXd evaluate(const PersistenceLandscape& l, const GridSpec& grid, int levels) {
  if (grid.t_min >= grid.t_max) throw config_error("evaluate: grid t_min must be below t_max");
  if (grid.n < 2) throw config_error("evaluate: grid needs at least 2 points");
  int K = levels > 0 ? levels : l.level_count();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(std::max(K, 0), grid.n);
  for (int k = 0; k < K; ++k)
    for (int i = 0; i < grid.n; ++i) out(k, i) = l.value(k, grid.point(i));
  return out;
}

PersistenceLandscape mean_landscape(const std::vector<PersistenceLandscape>& ls,
                                    const GridSpec& grid) {
  if (ls.empty()) throw config_error("mean_landscape: empty input");
  for (const PersistenceLandscape& l : ls)
    if (l.homology_dim != ls.front().homology_dim)
      throw config_error("mean_landscape: homology dimensions differ");

  int K = 0;
  for (const PersistenceLandscape& l : ls) K = std::max(K, l.level_count());
  K = std::max(K, 1);

  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(K, grid.n);
  for (const PersistenceLandscape& l : ls) acc += evaluate(l, grid, K);
  acc /= static_cast<double>(ls.size());

  PersistenceLandscape mean;
  mean.homology_dim = ls.front().homology_dim;
  mean.grid = grid;
  mean.levels.resize(K);
  for (int k = 0; k < K; ++k) {
    mean.levels[k].reserve(grid.n);
    for (int i = 0; i < grid.n; ++i) mean.levels[k].emplace_back(grid.point(i), acc(k, i));
  }
  return mean;
}

PersistenceLandscape subtract(const PersistenceLandscape& a, const PersistenceLandscape& b,
                              const GridSpec& grid) {
  if (a.homology_dim != b.homology_dim)
    throw config_error("subtract: homology dimensions differ");
  int K = std::max({a.level_count(), b.level_count(), 1});
  Eigen::MatrixXd diff = evaluate(a, grid, K) - evaluate(b, grid, K);

  PersistenceLandscape out;
  out.homology_dim = a.homology_dim;
  out.grid = grid;
  out.levels.resize(K);
  for (int k = 0; k < K; ++k) {
    out.levels[k].reserve(grid.n);
    for (int i = 0; i < grid.n; ++i) out.levels[k].emplace_back(grid.point(i), diff(k, i));
  }
  return out;
}

namespace {

// Exact integral of |v(t)|^p over one linear segment, p in {1, 2}.
double segment_abs_pow(double t0, double v0, double t1, double v1, double p) {
  double dt = t1 - t0;
  if (dt <= 0.0) return 0.0;
  if (v0 * v1 < 0.0) {
    // Split at the zero crossing so each piece has one sign.
    double tz = t0 + dt * (v0 / (v0 - v1));
    return segment_abs_pow(t0, v0, tz, 0.0, p) + segment_abs_pow(tz, 0.0, t1, v1, p);
  }
  double a0 = std::abs(v0), a1 = std::abs(v1);
  if (p == 1.0) return dt * (a0 + a1) / 2.0;
  return dt * (a0 * a0 + a0 * a1 + a1 * a1) / 3.0;
}

}  // namespace

double lp_norm(const PersistenceLandscape& l, double p, int levels) {
  if (p != 1.0 && p != 2.0 && !is_inf(p))
    throw config_error("lp_norm: p must be 1, 2 or infinity");
  int K = levels > 0 ? std::min(levels, l.level_count()) : l.level_count();

  if (is_inf(p)) {
    double m = 0.0;
    for (int k = 0; k < K; ++k)
      for (const auto& [t, v] : l.levels[k]) m = std::max(m, std::abs(v));
    return m;
  }

  double total = 0.0;
  for (int k = 0; k < K; ++k) {
    const auto& pts = l.levels[k];
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (l.grid) {
        // Grid-backed landscapes integrate by the trapezoidal rule.
        double f0 = std::pow(std::abs(pts[i - 1].second), p);
        double f1 = std::pow(std::abs(pts[i].second), p);
        total += (pts[i].first - pts[i - 1].first) * (f0 + f1) / 2.0;
      } else {
        total += segment_abs_pow(pts[i - 1].first, pts[i - 1].second, pts[i].first,
                                 pts[i].second, p);
      }
    }
  }
  return std::pow(total, 1.0 / p);
}

double inner_product(const PersistenceLandscape& a, const PersistenceLandscape& b,
                     int levels) {
  if (levels < 0) throw config_error("inner_product: levels must be nonnegative");
  int K = std::min(a.level_count(), b.level_count());
  if (levels > 0) K = std::min(K, levels);

  double total = 0.0;
  for (int k = 0; k < K; ++k) {
    const auto& pa = a.levels[k];
    const auto& pb = b.levels[k];
    if (pa.size() < 2 || pb.size() < 2) continue;
    const double lo = std::max(pa.front().first, pb.front().first);
    const double hi = std::min(pa.back().first, pb.back().first);
    if (hi <= lo) continue;

    // Both operands are linear between adjacent merged breakpoints, so the
    // quadratic product integrates in closed form on each segment.
    std::vector<double> xs;
    xs.reserve(pa.size() + pb.size() + 2);
    xs.push_back(lo);
    for (const auto& [x, y] : pa)
      if (x > lo && x < hi) xs.push_back(x);
    for (const auto& [x, y] : pb)
      if (x > lo && x < hi) xs.push_back(x);
    xs.push_back(hi);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    double x0 = xs.front();
    double va0 = polyline_at(pa, x0);
    double vb0 = polyline_at(pb, x0);
    for (std::size_t i = 1; i < xs.size(); ++i) {
      const double x1 = xs[i];
      const double va1 = polyline_at(pa, x1);
      const double vb1 = polyline_at(pb, x1);
      total += (x1 - x0) *
               (2.0 * va0 * vb0 + va0 * vb1 + va1 * vb0 + 2.0 * va1 * vb1) / 6.0;
      x0 = x1;
      va0 = va1;
      vb0 = vb1;
    }
  }
  return total;
}

}  // namespace tdanet
