#pragma once

#include "tdanet/types.hpp"

namespace tdanet {

// Clique (Vietoris-Rips) filtration of a distance matrix. Vertices enter at 0,
// a k-simplex at the maximum pairwise distance among its vertices. Simplices
// up to dimension max_dim are enumerated, so homology is valid up to
// max_dim - 1. Throws guard_error when C(P, max_dim + 1) exceeds 1e7.
Filtration rips_filtration(const DistanceMatrix& D, int max_dim);

enum class Reduction { clearing, naive };

// Persistence via boundary-matrix reduction over Z/2 in filtration order.
// Zero-persistence pairs are dropped. The clearing and naive strategies
// produce identical diagrams.
PersistenceDiagram persistence(const Filtration& f, Reduction mode = Reduction::clearing);

// Dimension-0 pairs through the union-find formulation; must agree with the
// reduction output. Returns the finite pairs (births all 0 for Rips) plus one
// infinite birth per final component, encoded as a diagram.
PersistenceDiagram h0_union_find(const DistanceMatrix& D);

BettiCurve betti_curve(const PersistenceDiagram& pd);

// Optimal-matching diagram metrics with diagonal augmentation. Infinite bars
// must pair with infinite bars; otherwise the distance is +infinity. Exact for
// diagrams of at most 64 points per dimension (guard_error beyond).
double bottleneck(const PersistenceDiagram& a, const PersistenceDiagram& b, int dim);
double wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b, int dim, double p);

}  // namespace tdanet
