#include "tdanet/embed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tdanet {

PointCloud delay_embed(const std::vector<double>& series, int dimension, int lag) {
  if (dimension < 2) throw config_error("delay_embed: dimension must be at least 2");
  if (lag < 1) throw config_error("delay_embed: lag must be at least 1");
  const long T = static_cast<long>(series.size());
  const long span = static_cast<long>(dimension - 1) * lag;
  if (T <= span) throw data_error("delay_embed: series too short for this embedding");

  PointCloud cloud;
  cloud.delay = lag;
  cloud.dimension = dimension;
  cloud.points = Eigen::MatrixXd(T - span, dimension);
  for (long s = span; s < T; ++s)
    for (int j = 0; j < dimension; ++j)
      cloud.points(s - span, j) = series[s - static_cast<long>(j) * lag];
  return cloud;
}

DistanceMatrix cloud_distances(const PointCloud& cloud) {
  const long N = cloud.points.rows();
  if (N < 1) throw data_error("cloud_distances: empty cloud");
  DistanceMatrix D;
  D.values = Eigen::MatrixXd::Zero(N, N);
  for (long i = 0; i < N; ++i)
    for (long j = i + 1; j < N; ++j) {
      double d = (cloud.points.row(i) - cloud.points.row(j)).norm();
      D.values(i, j) = D.values(j, i) = d;
    }
  return D;
}

SmoothedSeries smooth(const std::vector<double>& series, int window) {
  if (window < 1 || window % 2 == 0) throw config_error("smooth: window must be odd and positive");
  const long T = static_cast<long>(series.size());
  if (window > T) throw data_error("smooth: window exceeds series length");

  SmoothedSeries out;
  out.window = window;
  out.values.resize(T);
  const long h = window / 2;
  for (long t = 0; t < T; ++t) {
    long lo = std::max<long>(0, t - h);
    long hi = std::min(T - 1, t + h);
    double acc = 0.0;
    for (long u = lo; u <= hi; ++u) acc += series[u];
    out.values[t] = acc / static_cast<double>(hi - lo + 1);
  }
  return out;
}

PersistenceDiagram sublevel_persistence(const SmoothedSeries& series) {
  const std::vector<double>& v = series.values;
  const long T = static_cast<long>(v.size());
  if (T < 2) throw data_error("sublevel_persistence: need at least 2 samples");

  // Activation order: by (value, index) so ties resolve to the earlier index.
  std::vector<long> order(T);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](long a, long b) {
    return v[a] != v[b] ? v[a] < v[b] : a < b;
  });

  std::vector<long> parent(T, -1);  // -1 marks an inactive sample
  std::vector<long> comp_min(T);    // root -> index of the component minimum
  auto find = [&](long x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto older = [&](long a, long b) {  // index of the elder minimum
    if (v[a] != v[b]) return v[a] < v[b] ? a : b;
    return a < b ? a : b;
  };

  PersistenceDiagram pd;
  pd.max_dim = 1;
  for (long i : order) {
    parent[i] = i;
    comp_min[i] = i;
    for (long n : {i - 1, i + 1}) {
      if (n < 0 || n >= T || parent[n] < 0) continue;
      long ra = find(i), rb = find(n);
      if (ra == rb) continue;
      long elder = older(comp_min[ra], comp_min[rb]);
      long young = elder == comp_min[ra] ? comp_min[rb] : comp_min[ra];
      if (v[i] > v[young]) pd.finite[0].push_back({v[young], v[i]});
      parent[rb] = ra;
      comp_min[ra] = elder;
    }
  }
  for (long i = 0; i < T; ++i)
    if (parent[i] == i) pd.infinite[0].push_back(v[comp_min[i]]);

  std::vector<double> thresholds(v);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  pd.thresholds = std::move(thresholds);
  pd.sort_pairs();
  return pd;
}

}  // namespace tdanet
