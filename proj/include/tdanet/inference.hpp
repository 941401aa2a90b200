#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tdanet/types.hpp"

namespace tdanet {

// Bundle per-subject landscapes into a group sample. The homology dimension
// is taken from the first landscape; every landscape must agree, and any
// grid-backed landscapes must share one grid. Throws config_error otherwise.
GroupSample group_from_landscapes(std::vector<PersistenceLandscape> landscapes);

// Two-sample discrepancy: the L2 norm (over the landscape argument, summed
// over the first `levels` levels; 0 = all levels) of the difference between
// the group mean landscapes,
//   T = || mean(g1) - mean(g2) ||_2.
// Computed exactly through pairwise landscape inner products, so it never
// touches an evaluation grid. Symmetric in the two groups. Throws
// config_error for empty or incompatible groups.
double test_statistic(const GroupSample& g1, const GroupSample& g2, int levels = 0);

// Two-sample permutation test on the statistic above. The pooled landscapes
// are reshuffled B times into groups of the original sizes; each shuffle is
// seeded from (seed, replicate index), so the null sample is deterministic
// and independent of evaluation order. Landscape inner products are computed
// once up front; every shuffle costs O((n1+n2)^2) arithmetic on the Gram
// matrix, which keeps B = 100000 cheap.
//   p_value  = (1 + #{T* >= T_observed}) / (B + 1)
//   threshold = empirical (1-alpha)-quantile of the null sample (the
//               ceil((1-alpha) B)-th smallest value)
// Pooling is canonicalized by landscape content, so swapping the two input
// groups reproduces the identical null sample. One-sided: large T rejects.
// Requires n1, n2 >= 1, n1 + n2 >= 4, B >= 99, 0 < alpha < 1.
PermutationTestReport permutation_test(const GroupSample& g1, const GroupSample& g2,
                                       long B, double alpha, std::uint64_t seed,
                                       int levels = 0);

}  // namespace tdanet
