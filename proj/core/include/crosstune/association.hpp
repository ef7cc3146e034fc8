#pragma once

#include <optional>
#include <vector>

#include "crosstune/types.hpp"

namespace crosstune {

struct Assignment {
  // Per cluster: the identity index it carries, or nullopt for a dummy
  // (unassigned) cluster. Exactly min(g, m) clusters carry real identities.
  std::vector<std::optional<int>> cluster_to_identity;
  double total_cost = 0.0;
};

/// Bit k = 1 iff the cluster contains a sample from event k.
EventVector cluster_event_vector(const std::vector<int>& cluster_rows,
                                 const Dataset& ds, int h);

/// Bit k = 1 iff attendance[k][identity] >= binarize_threshold.
EventVector device_event_vector(const std::vector<AttendanceVector>& attendance,
                                int identity, double binarize_threshold);

/// Squared Euclidean distance; Hamming distance on binary vectors.
double assignment_cost(const EventVector& r_c, const EventVector& r_l);

/// Minimum-cost assignment of m identities to g >= m clusters. The g x m
/// cost matrix is padded with g - m zero-cost dummy columns and the g x g
/// perfect matching is solved by the Hungarian algorithm; dummy columns are
/// stripped from the result. Among equal-cost optima the lexicographically
/// smallest assignment by cluster index is returned, with "dummy" ordered
/// after every real identity.
Assignment hungarian_assign(const Mat& cost);

}  // namespace crosstune
