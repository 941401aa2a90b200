#include "tdanet/homology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace tdanet {

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::uint64_t pack_verts(const std::array<int, 4>& v, int dim) {
  std::uint64_t key = 0;
  for (int i = 0; i <= dim; ++i) key = (key << 16) | static_cast<std::uint64_t>(v[i] + 1);
  return key;
}

bool simplex_less(const Simplex& a, const Simplex& b) {
  if (a.value != b.value) return a.value < b.value;
  if (a.dim != b.dim) return a.dim < b.dim;
  return a.verts < b.verts;
}

// Symmetric difference of two ascending index lists (Z/2 column addition).
void add_column(std::vector<int>& col, const std::vector<int>& other, std::vector<int>& scratch) {
  scratch.clear();
  std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                std::back_inserter(scratch));
  col.swap(scratch);
}

}  // namespace

Filtration rips_filtration(const DistanceMatrix& D, int max_dim) {
  D.validate();
  if (max_dim < 1 || max_dim > 3)
    throw config_error("rips_filtration: max_dim must be 1, 2 or 3");
  const int P = D.size();
  if (binomial(P, max_dim + 1) > 1e7)
    throw guard_error("rips_filtration: clique enumeration budget exceeded (C(P, max_dim+1) > 1e7)");

  const Eigen::MatrixXd& d = D.values;
  Filtration f;
  f.max_dim = max_dim;
  f.vertex_count = P;

  for (int i = 0; i < P; ++i) {
    Simplex s;
    s.verts[0] = i;
    s.dim = 0;
    s.value = 0.0;
    f.simplices.push_back(s);
  }
  std::vector<double> edge_values;
  for (int i = 0; i < P; ++i)
    for (int j = i + 1; j < P; ++j) {
      Simplex s;
      s.verts[0] = i;
      s.verts[1] = j;
      s.dim = 1;
      s.value = d(i, j);
      f.simplices.push_back(s);
      edge_values.push_back(d(i, j));
    }
  if (max_dim >= 2) {
    for (int i = 0; i < P; ++i)
      for (int j = i + 1; j < P; ++j)
        for (int k = j + 1; k < P; ++k) {
          Simplex s;
          s.verts = {i, j, k, -1};
          s.dim = 2;
          s.value = std::max({d(i, j), d(i, k), d(j, k)});
          f.simplices.push_back(s);
        }
  }
  if (max_dim >= 3) {
    for (int i = 0; i < P; ++i)
      for (int j = i + 1; j < P; ++j)
        for (int k = j + 1; k < P; ++k)
          for (int l = k + 1; l < P; ++l) {
            Simplex s;
            s.verts = {i, j, k, l};
            s.dim = 3;
            s.value = std::max({d(i, j), d(i, k), d(i, l), d(j, k), d(j, l), d(k, l)});
            f.simplices.push_back(s);
          }
  }

  std::sort(f.simplices.begin(), f.simplices.end(), simplex_less);
  std::sort(edge_values.begin(), edge_values.end());
  edge_values.erase(std::unique(edge_values.begin(), edge_values.end()), edge_values.end());
  f.thresholds = std::move(edge_values);
  return f;
}

PersistenceDiagram persistence(const Filtration& f, Reduction mode) {
  const auto& simplices = f.simplices;
  const int m = static_cast<int>(simplices.size());

  std::unordered_map<std::uint64_t, int> position;
  position.reserve(m * 2);
  for (int j = 0; j < m; ++j) position[pack_verts(simplices[j].verts, simplices[j].dim)] = j;

  // Boundary columns as ascending position lists.
  std::vector<std::vector<int>> columns(m);
  for (int j = 0; j < m; ++j) {
    const Simplex& s = simplices[j];
    if (s.dim == 0) continue;
    std::vector<int>& col = columns[j];
    for (int drop = 0; drop <= s.dim; ++drop) {
      std::array<int, 4> face{-1, -1, -1, -1};
      int w = 0;
      for (int i = 0; i <= s.dim; ++i)
        if (i != drop) face[w++] = s.verts[i];
      col.push_back(position.at(pack_verts(face, s.dim - 1)));
    }
    std::sort(col.begin(), col.end());
  }

  std::vector<int> pivot_owner(m, -1);  // row -> column whose low is that row
  std::vector<char> creator(m, 0), killed(m, 0);
  std::vector<std::pair<int, int>> pairs;  // (birth position, death position)
  std::vector<int> scratch;

  auto reduce_column = [&](int j) {
    std::vector<int>& col = columns[j];
    while (!col.empty()) {
      int low = col.back();
      int owner = pivot_owner[low];
      if (owner < 0) {
        pivot_owner[low] = j;
        killed[low] = 1;
        pairs.emplace_back(low, j);
        return;
      }
      add_column(col, columns[owner], scratch);
    }
    creator[j] = 1;
  };

  if (mode == Reduction::naive) {
    for (int j = 0; j < m; ++j) reduce_column(j);
  } else {
    // Clearing: reduce dimensions from the top down; a simplex paired as a
    // birth in dimension d+1 has a zero column in dimension d and is skipped.
    std::vector<char> cleared(m, 0);
    for (int d = f.max_dim; d >= 0; --d) {
      for (int j = 0; j < m; ++j) {
        if (simplices[j].dim != d) continue;
        if (cleared[j]) {
          columns[j].clear();
          creator[j] = 1;
          continue;
        }
        reduce_column(j);
      }
      for (const auto& [birth, death] : pairs)
        if (simplices[death].dim == d) cleared[birth] = 1;
    }
  }

  PersistenceDiagram pd;
  pd.max_dim = f.max_dim;
  pd.thresholds = f.thresholds;
  for (const auto& [b, dth] : pairs) {
    int dim = simplices[b].dim;
    if (dim >= f.max_dim) continue;
    double birth = simplices[b].value;
    double death = simplices[dth].value;
    if (birth == death) continue;
    pd.finite[dim].push_back({birth, death});
  }
  for (int j = 0; j < m; ++j) {
    int dim = simplices[j].dim;
    if (creator[j] && !killed[j] && dim < f.max_dim) pd.infinite[dim].push_back(simplices[j].value);
  }
  pd.sort_pairs();
  return pd;
}

PersistenceDiagram h0_union_find(const DistanceMatrix& D) {
  D.validate();
  const int P = D.size();
  struct Edge {
    int i, j;
    double value;
  };
  std::vector<Edge> edges;
  edges.reserve(P * (P - 1) / 2);
  for (int i = 0; i < P; ++i)
    for (int j = i + 1; j < P; ++j) edges.push_back({i, j, D.values(i, j)});
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.value != b.value) return a.value < b.value;
    return std::pair(a.i, a.j) < std::pair(b.i, b.j);
  });

  std::vector<int> parent(P);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  PersistenceDiagram pd;
  pd.max_dim = 1;
  for (const Edge& e : edges) {
    int a = find(e.i), b = find(e.j);
    if (a == b) continue;
    // Roots are the oldest vertices of their components; the younger root dies.
    int survivor = std::min(a, b);
    parent[std::max(a, b)] = survivor;
    if (e.value != 0.0) pd.finite[0].push_back({0.0, e.value});
  }
  for (int v = 0; v < P; ++v)
    if (find(v) == v) pd.infinite[0].push_back(0.0);
  pd.sort_pairs();
  return pd;
}

BettiCurve betti_curve(const PersistenceDiagram& pd) {
  BettiCurve curve;
  for (int dim = 0; dim < 3; ++dim) {
    std::vector<std::pair<double, int>> events;  // (value, +-1)
    for (const Pair& p : pd.finite[dim]) {
      events.emplace_back(p.birth, +1);
      events.emplace_back(p.death, -1);
    }
    for (double b : pd.infinite[dim]) events.emplace_back(b, +1);
    std::sort(events.begin(), events.end());
    BettiCurve::Step& step = curve.dims[dim];
    long count = 0;
    std::size_t i = 0;
    while (i < events.size()) {
      double v = events[i].first;
      while (i < events.size() && events[i].first == v) count += events[i++].second;
      step.eps.push_back(v);
      step.count.push_back(count);
    }
  }
  return curve;
}

long BettiCurve::Step::at(double e) const {
  auto it = std::upper_bound(eps.begin(), eps.end(), e);
  if (it == eps.begin()) return count_before;
  return count[static_cast<std::size_t>(it - eps.begin()) - 1];
}

namespace {

double linf(const Pair& a, const Pair& b) {
  return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

// Distance between infinite bars matched by sorted birth; +inf on count mismatch.
bool match_infinite(const PersistenceDiagram& a, const PersistenceDiagram& b, int dim,
                    std::vector<double>& deltas) {
  std::vector<double> ia = a.infinite[dim], ib = b.infinite[dim];
  if (ia.size() != ib.size()) return false;
  std::sort(ia.begin(), ia.end());
  std::sort(ib.begin(), ib.end());
  deltas.resize(ia.size());
  for (std::size_t k = 0; k < ia.size(); ++k) deltas[k] = std::abs(ia[k] - ib[k]);
  return true;
}

// Perfect-matching feasibility at cost cap c for the diagonal-augmented
// bipartite graph (Kuhn's algorithm).
class BottleneckFeasibility {
 public:
  BottleneckFeasibility(const std::vector<Pair>& a, const std::vector<Pair>& b)
      : a_(a), b_(b), n_(static_cast<int>(a.size())), m_(static_cast<int>(b.size())) {}

  bool feasible(double c) {
    int left = n_ + m_, right = m_ + n_;
    match_left_.assign(left, -1);
    match_right_.assign(right, -1);
    cap_ = c;
    int matched = 0;
    for (int u = 0; u < left; ++u) {
      seen_.assign(right, 0);
      if (try_match(u)) ++matched;
    }
    return matched == left;
  }

 private:
  bool edge_ok(int u, int v) const {
    if (u < n_) {
      if (v < m_) return linf(a_[u], b_[v]) <= cap_;
      return (v - m_) == u && a_[u].persistence() / 2.0 <= cap_;
    }
    int bj = u - n_;
    if (v < m_) return v == bj && b_[bj].persistence() / 2.0 <= cap_;
    return true;  // diagonal slot to diagonal slot
  }

  bool try_match(int u) {
    int right = m_ + n_;
    for (int v = 0; v < right; ++v) {
      if (seen_[v] || !edge_ok(u, v)) continue;
      seen_[v] = 1;
      if (match_right_[v] < 0 || try_match(match_right_[v])) {
        match_right_[v] = u;
        match_left_[u] = v;
        return true;
      }
    }
    return false;
  }

  const std::vector<Pair>& a_;
  const std::vector<Pair>& b_;
  int n_, m_;
  double cap_ = 0;
  std::vector<int> match_left_, match_right_;
  std::vector<char> seen_;
};

// Exact min-cost assignment (Hungarian algorithm with potentials), O(N^3).
double hungarian(const std::vector<std::vector<double>>& cost) {
  int n = static_cast<int>(cost.size());
  if (n == 0) return 0.0;
  const double INF = std::numeric_limits<double>::max();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, INF);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      double delta = INF;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) total += cost[p[j] - 1][j - 1];
  return total;
}

void check_metric_guard(const std::vector<Pair>& a, const std::vector<Pair>& b) {
  if (a.size() > 64 || b.size() > 64)
    throw guard_error("diagram metric: exactness budget is 64 points per diagram");
}

}  // namespace

double bottleneck(const PersistenceDiagram& a, const PersistenceDiagram& b, int dim) {
  const std::vector<Pair>& A = a.finite[dim];
  const std::vector<Pair>& B = b.finite[dim];
  check_metric_guard(A, B);

  std::vector<double> inf_deltas;
  if (!match_infinite(a, b, dim, inf_deltas)) return kInf;
  double inf_part = 0.0;
  for (double d : inf_deltas) inf_part = std::max(inf_part, d);

  if (A.empty() && B.empty()) return inf_part;

  std::vector<double> candidates{0.0};
  for (const Pair& x : A) candidates.push_back(x.persistence() / 2.0);
  for (const Pair& y : B) candidates.push_back(y.persistence() / 2.0);
  for (const Pair& x : A)
    for (const Pair& y : B) candidates.push_back(linf(x, y));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  BottleneckFeasibility feas(A, B);
  std::size_t lo = 0, hi = candidates.size() - 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (feas.feasible(candidates[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return std::max(candidates[lo], inf_part);
}

double wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b, int dim, double p) {
  if (p < 1.0) throw config_error("wasserstein: p must be >= 1");
  const std::vector<Pair>& A = a.finite[dim];
  const std::vector<Pair>& B = b.finite[dim];
  check_metric_guard(A, B);

  std::vector<double> inf_deltas;
  if (!match_infinite(a, b, dim, inf_deltas)) return kInf;
  double total = 0.0;
  for (double d : inf_deltas) total += std::pow(d, p);

  int n = static_cast<int>(A.size()), m = static_cast<int>(B.size());
  if (n + m > 0) {
    int N = n + m;
    std::vector<std::vector<double>> cost(N, std::vector<double>(N, 0.0));
    for (int i = 0; i < n; ++i) {
      double diag = std::pow(A[i].persistence() / 2.0, p);
      for (int j = 0; j < m; ++j) cost[i][j] = std::pow(linf(A[i], B[j]), p);
      for (int j = m; j < N; ++j) cost[i][j] = diag;
    }
    // Diagonal rows absorb points of B at those points' own projection cost;
    // diagonal-to-diagonal matches are free.
    for (int i = n; i < N; ++i)
      for (int j = 0; j < m; ++j) cost[i][j] = std::pow(B[j].persistence() / 2.0, p);
    total += hungarian(cost);
  }
  return std::pow(total, 1.0 / p);
}

void PersistenceDiagram::sort_pairs() {
  for (auto& v : finite) std::sort(v.begin(), v.end());
  for (auto& v : infinite) std::sort(v.begin(), v.end());
}

}  // namespace tdanet
