#pragma once

#include <vector>

#include "crosstune/types.hpp"

namespace crosstune {

struct ClusterSet {
  int g = 0;
  std::vector<int> membership;  // per sample, cluster index in [0, g)

  std::vector<std::vector<int>> groups() const;
};

/// Log-likelihood that two face samples show the same subject:
///   beta * (fuzzy intersection - fuzzy union) - ||z_i - z_j||^2
/// The attendance term vanishes for samples of the same event.
double joint_log_similarity(const Vec& z_i, const Vec& z_j,
                            const AttendanceVector& u_k,
                            const AttendanceVector& u_p, double beta);

/// Dense symmetric n x n similarity with zero diagonal. `features` rows must
/// be aligned with ds.samples and `attendance` with ds.events.
Mat similarity_matrix(const Dataset& ds, const Mat& features,
                      const std::vector<AttendanceVector>& attendance,
                      double beta);

/// Average-linkage agglomerative clustering on a similarity matrix: starting
/// from singletons, repeatedly merges the pair of clusters with the highest
/// average pairwise similarity until exactly g clusters remain. Ties are
/// broken by the lexicographically smallest (min id, max id) pair, where a
/// cluster's id is its smallest member sample index. Cluster indices in the
/// result are assigned in increasing id order.
ClusterSet agglomerative_cluster(const Mat& sim, int g);

/// Runs the same merge sequence once and snapshots the partition at every
/// requested cluster count. Equivalent to calling agglomerative_cluster per
/// g (the merge sequence is identical), but pays for one pass.
/// Returned cluster sets are ordered like `gs`.
std::vector<ClusterSet> agglomerative_cluster_cuts(const Mat& sim,
                                                   const std::vector<int>& gs);

}  // namespace crosstune
