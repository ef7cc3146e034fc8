#pragma once

#include <optional>
#include <vector>

#include "crosstune/types.hpp"

namespace crosstune {

/// Per-sample vote counters, one per identity.
struct VoteTally {
  std::vector<std::vector<int>> votes;  // n x m
  int rounds = 0;                       // number of g values actually swept
};

/// Sweeps the cluster count g = k * m for k in [g_mult_lo, g_mult_hi]
/// (clamped to [m, n], duplicates collapsed); for each g, clusters with the
/// joint similarity, solves the event-vector assignment, and adds one vote
/// per sample for the identity its cluster carries. Samples in dummy
/// clusters receive no vote for that g.
VoteTally sweep_and_vote(const Dataset& ds, const Mat& features,
                         const std::vector<AttendanceVector>& attendance,
                         const HyperParams& hyper);

/// Vote counts normalized into per-sample probability vectors. Zero-vote
/// samples get an all-zero vector and are flagged non-POI candidates.
std::vector<SoftLabel> soft_labels(const VoteTally& tally);

/// Argmax of the probabilities (lowest index wins ties); absent for
/// zero-vote samples.
std::optional<int> harden(const SoftLabel& soft);

}  // namespace crosstune
