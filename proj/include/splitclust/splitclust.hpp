#pragma once

// Clustering partially observed graphs by convex sparse-plus-low-rank
// splitting, with optimality certificates and a planted-partition
// experiment harness.

#include "splitclust/certificates.hpp"
#include "splitclust/clustering.hpp"
#include "splitclust/generator.hpp"
#include "splitclust/graph.hpp"
#include "splitclust/matrix.hpp"
#include "splitclust/pipeline.hpp"
#include "splitclust/rng.hpp"
#include "splitclust/solver.hpp"
#include "splitclust/subspace.hpp"
#include "splitclust/sweep.hpp"
#include "splitclust/tolerances.hpp"

namespace splitclust {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace splitclust
