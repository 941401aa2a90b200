#pragma once

#include <optional>
#include <vector>

#include "tdanet/types.hpp"

namespace tdanet {

// Exact landscape of the finite pairs of dimension `dim`: level k is the
// k-th largest of the tent functions max(0, min(t - birth, death - t)).
// Unbounded classes are dropped unless `infinite_cap` turns them into
// (birth, cap) pairs. At most max_levels levels are stored; trailing
// identically-zero levels are not stored.
PersistenceLandscape landscape_from_diagram(const PersistenceDiagram& pd, int dim,
                                            int max_levels = 16,
                                            std::optional<double> infinite_cap = std::nullopt);

// Piecewise-linear evaluation on a uniform grid; one row per level. With
// levels == 0 the stored level count is used; extra rows are zero.
Eigen::MatrixXd evaluate(const PersistenceLandscape& l, const GridSpec& grid, int levels = 0);

// Pointwise mean on the grid; level count is the max over inputs.
PersistenceLandscape mean_landscape(const std::vector<PersistenceLandscape>& ls,
                                    const GridSpec& grid);

// Pointwise difference a - b on the grid (levels padded with zero).
PersistenceLandscape subtract(const PersistenceLandscape& a, const PersistenceLandscape& b,
                              const GridSpec& grid);

// Lp norm over the first `levels` levels (0 = stored count), treating the
// landscape as one function on level x t: (sum_k integral |lambda_k|^p)^(1/p).
// p must be 1, 2 or infinity. Exact piecewise integration for breakpoint
// landscapes; trapezoidal quadrature for grid-backed ones.
double lp_norm(const PersistenceLandscape& l, double p, int levels = 0);

// L2 inner product <a, b> = sum_k integral a_k(t) b_k(t) dt over the first
// `levels` levels (0 = all shared levels). Both operands are integrated as
// the piecewise-linear functions their stored breakpoints define, so the
// result is exact for that representation.
double inner_product(const PersistenceLandscape& a, const PersistenceLandscape& b,
                     int levels = 0);

}  // namespace tdanet
