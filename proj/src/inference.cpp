#include "tdanet/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <optional>

#include "tdanet/landscape.hpp"
#include "tdanet/rng.hpp"

namespace tdanet {

namespace {

std::uint64_t fnv1a_bytes(const void* data, std::size_t size, std::uint64_t h) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t content_hash(const PersistenceLandscape& l) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::int64_t dim = l.homology_dim;
  h = fnv1a_bytes(&dim, sizeof dim, h);
  for (const auto& level : l.levels) {
    const std::uint64_t n = level.size();
    h = fnv1a_bytes(&n, sizeof n, h);
    for (const auto& [x, y] : level) {
      h = fnv1a_bytes(&x, sizeof x, h);
      h = fnv1a_bytes(&y, sizeof y, h);
    }
  }
  return h;
}

// Total order on landscape content; used to break hash ties so the pooled
// ordering never depends on which input group a landscape arrived in.
bool content_less(const PersistenceLandscape& a, const PersistenceLandscape& b) {
  if (a.homology_dim != b.homology_dim) return a.homology_dim < b.homology_dim;
  if (a.levels.size() != b.levels.size()) return a.levels.size() < b.levels.size();
  for (std::size_t k = 0; k < a.levels.size(); ++k) {
    const auto& la = a.levels[k];
    const auto& lb = b.levels[k];
    if (la.size() != lb.size()) return la.size() < lb.size();
    for (std::size_t i = 0; i < la.size(); ++i) {
      if (la[i].first != lb[i].first) return la[i].first < lb[i].first;
      if (la[i].second != lb[i].second) return la[i].second < lb[i].second;
    }
  }
  return false;
}

void check_group(const GroupSample& g, const char* name) {
  if (g.landscapes.empty())
    throw config_error(std::string("permutation test: group '") + name + "' is empty");
  for (const auto& l : g.landscapes)
    if (l.homology_dim != g.homology_dim)
      throw config_error(std::string("permutation test: group '") + name +
                         "' mixes homology dimensions");
}

void check_compatible(const GroupSample& g1, const GroupSample& g2) {
  check_group(g1, "1");
  check_group(g2, "2");
  if (g1.homology_dim != g2.homology_dim)
    throw config_error("permutation test: groups have different homology dimensions");
  std::optional<GridSpec> grid;
  for (const GroupSample* g : {&g1, &g2})
    for (const auto& l : g->landscapes) {
      if (!l.grid) continue;
      if (!grid) grid = *l.grid;
      else if (!(*grid == *l.grid))
        throw config_error("permutation test: grid-backed landscapes use different grids");
    }
}

// Pooled view sorted by content so the ordering is symmetric in the inputs.
struct Pool {
  std::vector<const PersistenceLandscape*> items;
  std::vector<int> origin;  // 0 = first group, 1 = second group
  std::vector<std::size_t> observed;  // positions forming the subset group
  long subset_size = 0;   // size of the smaller group
  long rest_size = 0;
};

Pool make_pool(const GroupSample& g1, const GroupSample& g2) {
  Pool pool;
  struct Entry {
    const PersistenceLandscape* l;
    std::uint64_t hash;
    int origin;
  };
  std::vector<Entry> entries;
  for (const auto& l : g1.landscapes) entries.push_back({&l, content_hash(l), 0});
  for (const auto& l : g2.landscapes) entries.push_back({&l, content_hash(l), 1});
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.hash != b.hash) return a.hash < b.hash;
    return content_less(*a.l, *b.l);
  });
  for (const Entry& e : entries) {
    pool.items.push_back(e.l);
    pool.origin.push_back(e.origin);
  }

  const long n1 = g1.size();
  const long n2 = g2.size();
  // The shuffled subset always has the smaller group's size; the statistic
  // is symmetric in the partition, so this makes the test invariant to
  // swapping the input groups. Equal sizes defer to the canonically first
  // pooled landscape's group, which is itself input-order independent.
  int subset_origin;
  if (n1 != n2)
    subset_origin = n1 < n2 ? 0 : 1;
  else
    subset_origin = pool.origin.front();
  pool.subset_size = std::min(n1, n2);
  pool.rest_size = std::max(n1, n2);
  for (std::size_t i = 0; i < pool.origin.size(); ++i)
    if (pool.origin[i] == subset_origin) pool.observed.push_back(i);
  return pool;
}

// Statistic of the partition {S, complement} from Gram-matrix aggregates:
// with a = 1/|S| on S and b = 1/|S^c| off S,
//   T^2 = u/k^2 + (total - 2 tS + u)/m^2 - 2 (tS - u)/(k m),
// where u = sum_{i,j in S} G_ij and tS = sum_{i in S} rowsum_i.
double partition_statistic(double u, double t_s, double total, double k, double m) {
  const double t2 =
      u / (k * k) + (total - 2.0 * t_s + u) / (m * m) - 2.0 * (t_s - u) / (k * m);
  return std::sqrt(std::max(0.0, t2));
}

struct GramAggregates {
  Eigen::MatrixXd gram;
  std::vector<double> row_sums;
  double total = 0.0;
};

GramAggregates make_gram(const Pool& pool, int levels) {
  const std::size_t n = pool.items.size();
  GramAggregates agg;
  agg.gram = Eigen::MatrixXd(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double g = inner_product(*pool.items[i], *pool.items[j], levels);
      agg.gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g;
      agg.gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = g;
    }
  agg.row_sums.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    agg.row_sums[i] = agg.gram.row(static_cast<Eigen::Index>(i)).sum();
    agg.total += agg.row_sums[i];
  }
  return agg;
}

double subset_statistic(const GramAggregates& agg, const std::vector<std::size_t>& subset,
                        double k, double m) {
  double u = 0.0;
  double t_s = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    t_s += agg.row_sums[subset[a]];
    u += agg.gram(static_cast<Eigen::Index>(subset[a]),
                  static_cast<Eigen::Index>(subset[a]));
    for (std::size_t b = a + 1; b < subset.size(); ++b)
      u += 2.0 * agg.gram(static_cast<Eigen::Index>(subset[a]),
                          static_cast<Eigen::Index>(subset[b]));
  }
  return partition_statistic(u, t_s, agg.total, k, m);
}

}  // namespace

GroupSample group_from_landscapes(std::vector<PersistenceLandscape> landscapes) {
  if (landscapes.empty())
    throw config_error("group_from_landscapes: need at least one landscape");
  GroupSample g;
  g.homology_dim = landscapes.front().homology_dim;
  for (const auto& l : landscapes) {
    if (l.homology_dim != g.homology_dim)
      throw config_error("group_from_landscapes: homology dimensions differ");
    if (l.grid) g.grid = *l.grid;
  }
  g.landscapes = std::move(landscapes);
  check_group(g, "sample");
  return g;
}

double test_statistic(const GroupSample& g1, const GroupSample& g2, int levels) {
  if (levels < 0) throw config_error("test_statistic: levels must be nonnegative");
  check_compatible(g1, g2);
  const Pool pool = make_pool(g1, g2);
  const GramAggregates agg = make_gram(pool, levels);
  return subset_statistic(agg, pool.observed, static_cast<double>(pool.subset_size),
                          static_cast<double>(pool.rest_size));
}

PermutationTestReport permutation_test(const GroupSample& g1, const GroupSample& g2,
                                       long B, double alpha, std::uint64_t seed,
                                       int levels) {
  if (levels < 0) throw config_error("permutation_test: levels must be nonnegative");
  check_compatible(g1, g2);
  if (g1.size() + g2.size() < 4)
    throw config_error("permutation_test: need at least four subjects in total");
  if (B < 99) throw config_error("permutation_test: need at least 99 permutations");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw config_error("permutation_test: alpha must lie in (0, 1)");

  const Pool pool = make_pool(g1, g2);
  const GramAggregates agg = make_gram(pool, levels);
  const double k = static_cast<double>(pool.subset_size);
  const double m = static_cast<double>(pool.rest_size);
  const std::size_t n = pool.items.size();

  PermutationTestReport report;
  report.observed = subset_statistic(agg, pool.observed, k, m);
  report.null_sample.resize(static_cast<std::size_t>(B));

  std::vector<std::size_t> indices(n);
  std::vector<std::size_t> subset(static_cast<std::size_t>(pool.subset_size));
  for (long b = 0; b < B; ++b) {
    Rng rng(derive_stream(seed, static_cast<std::uint64_t>(b) + 1));
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    for (long i = 0; i < pool.subset_size; ++i) {
      const std::uint64_t j =
          static_cast<std::uint64_t>(i) + rng.integer(static_cast<std::uint64_t>(n) -
                                                      static_cast<std::uint64_t>(i));
      std::swap(indices[static_cast<std::size_t>(i)], indices[static_cast<std::size_t>(j)]);
      subset[static_cast<std::size_t>(i)] = indices[static_cast<std::size_t>(i)];
    }
    report.null_sample[static_cast<std::size_t>(b)] = subset_statistic(agg, subset, k, m);
  }

  long exceed = 0;
  for (double t : report.null_sample)
    if (t >= report.observed) ++exceed;
  report.p_value = static_cast<double>(1 + exceed) / static_cast<double>(B + 1);

  // Empirical (1-alpha)-quantile: the smallest null value with at least a
  // (1-alpha) fraction of the sample at or below it.
  std::vector<double> sorted = report.null_sample;
  std::sort(sorted.begin(), sorted.end());
  long rank = static_cast<long>(std::ceil((1.0 - alpha) * static_cast<double>(B)));
  rank = std::clamp(rank, 1L, B);
  report.threshold = sorted[static_cast<std::size_t>(rank - 1)];

  report.alpha = alpha;
  report.B = B;
  report.seed = seed;
  report.levels = levels;
  report.homology_dim = g1.homology_dim;
  return report;
}

}  // namespace tdanet
