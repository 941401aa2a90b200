#pragma once

#include <vector>

#include "tdanet/types.hpp"

namespace tdanet {

// Delay embedding: row s = (Y(s), Y(s-lag), ..., Y(s-(m-1)*lag)), giving
// T - (m-1)*lag points in R^m.
PointCloud delay_embed(const std::vector<double>& series, int dimension = 2, int lag = 1);

// Pairwise Euclidean distances; symmetric by construction.
DistanceMatrix cloud_distances(const PointCloud& cloud);

// Centered moving average with truncated windows at the boundaries.
SmoothedSeries smooth(const std::vector<double>& series, int window);

// 0-dimensional sublevel-set persistence of a series: components are born at
// local minima and die at the merge maxima (elder rule: the component with
// the younger minimum dies). Ties are broken by index order, earlier index
// treated as infinitesimally lower. The global minimum's bar never dies.
PersistenceDiagram sublevel_persistence(const SmoothedSeries& series);

}  // namespace tdanet
