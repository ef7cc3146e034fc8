#include "crosstune/voting.hpp"

#include <algorithm>

#include "crosstune/association.hpp"
#include "crosstune/clustering.hpp"
#include "crosstune/log.hpp"

namespace crosstune {

VoteTally sweep_and_vote(const Dataset& ds, const Mat& features,
                         const std::vector<AttendanceVector>& attendance,
                         const HyperParams& hyper) {
  const int m = ds.num_identities();
  const int n = ds.num_samples();
  const int h = ds.num_events();
  if (m < 2) throw std::invalid_argument("sweep_and_vote: need at least 2 identities");
  if (n < m)
    throw std::invalid_argument("sweep_and_vote: fewer samples than identities");

  std::vector<int> gs;
  for (int k = hyper.g_mult_lo; k <= hyper.g_mult_hi; ++k) {
    const int g = std::clamp(k * m, m, n);
    if (gs.empty() || gs.back() != g) gs.push_back(g);
  }

  const Mat sim = similarity_matrix(ds, features, attendance, hyper.beta);
  const std::vector<ClusterSet> cuts = agglomerative_cluster_cuts(sim, gs);

  std::vector<EventVector> device_vectors;
  device_vectors.reserve(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j)
    device_vectors.push_back(
        device_event_vector(attendance, j, hyper.binarize_threshold));

  VoteTally tally;
  tally.votes.assign(static_cast<std::size_t>(n),
                     std::vector<int>(static_cast<std::size_t>(m), 0));
  tally.rounds = static_cast<int>(gs.size());

  for (const ClusterSet& cs : cuts) {
    const auto groups = cs.groups();
    Mat cost(cs.g, m);
    for (int c = 0; c < cs.g; ++c) {
      const EventVector rc = cluster_event_vector(groups[static_cast<std::size_t>(c)], ds, h);
      for (int j = 0; j < m; ++j)
        cost(c, j) = assignment_cost(rc, device_vectors[static_cast<std::size_t>(j)]);
    }
    const Assignment assign = hungarian_assign(cost);
    for (int c = 0; c < cs.g; ++c) {
      const auto id = assign.cluster_to_identity[static_cast<std::size_t>(c)];
      if (!id) continue;
      for (int row : groups[static_cast<std::size_t>(c)])
        ++tally.votes[static_cast<std::size_t>(row)][static_cast<std::size_t>(*id)];
    }
    CT_DEBUG("sweep g=%d: assignment cost %.1f", cs.g, assign.total_cost);
  }
  return tally;
}

std::vector<SoftLabel> soft_labels(const VoteTally& tally) {
  std::vector<SoftLabel> out;
  out.reserve(tally.votes.size());
  for (const auto& row : tally.votes) {
    SoftLabel label;
    label.probs = Vec::Zero(static_cast<Eigen::Index>(row.size()));
    int total = 0;
    for (int v : row) total += v;
    label.vote_count = total;
    if (total > 0) {
      for (std::size_t j = 0; j < row.size(); ++j)
        label.probs[static_cast<Eigen::Index>(j)] =
            static_cast<double>(row[j]) / static_cast<double>(total);
    }
    out.push_back(std::move(label));
  }
  return out;
}

std::optional<int> harden(const SoftLabel& soft) {
  if (soft.vote_count == 0) return std::nullopt;
  int best = 0;
  for (Eigen::Index j = 1; j < soft.probs.size(); ++j)
    if (soft.probs[j] > soft.probs[best]) best = static_cast<int>(j);
  return best;
}

}  // namespace crosstune
