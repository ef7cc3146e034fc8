#include "crosstune/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace crosstune {

std::vector<std::vector<int>> ClusterSet::groups() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(g));
  for (std::size_t i = 0; i < membership.size(); ++i)
    out[static_cast<std::size_t>(membership[i])].push_back(static_cast<int>(i));
  return out;
}

double joint_log_similarity(const Vec& z_i, const Vec& z_j,
                            const AttendanceVector& u_k,
                            const AttendanceVector& u_p, double beta) {
  if (z_i.size() != z_j.size())
    throw std::invalid_argument("joint_log_similarity: feature dimensions differ");
  const FuzzyOverlap overlap = fuzzy_overlap(u_k, u_p);
  const double attendance_term = overlap.intersection_mass - overlap.union_mass;
  const double feature_distance = (z_i - z_j).squaredNorm();
  return beta * attendance_term - feature_distance;
}

Mat similarity_matrix(const Dataset& ds, const Mat& features,
                      const std::vector<AttendanceVector>& attendance,
                      double beta) {
  const Eigen::Index n = features.rows();
  if (n != ds.num_samples())
    throw std::invalid_argument("similarity_matrix: features not aligned with samples");
  const int h = ds.num_events();
  if (static_cast<int>(attendance.size()) != h)
    throw std::invalid_argument("similarity_matrix: attendance not aligned with events");

  // The attendance term only depends on the event pair, so it is computed
  // once per (event, event) instead of once per sample pair.
  Mat att = Mat::Zero(h, h);
  for (int k = 0; k < h; ++k) {
    for (int p = k + 1; p < h; ++p) {
      const FuzzyOverlap o = fuzzy_overlap(attendance[static_cast<std::size_t>(k)],
                                           attendance[static_cast<std::size_t>(p)]);
      att(k, p) = att(p, k) = o.intersection_mass - o.union_mass;
    }
  }

  Mat sim(n, n);
  sim.noalias() = 2.0 * (features * features.transpose());
  const Vec sq = features.rowwise().squaredNorm();
  for (Eigen::Index i = 0; i < n; ++i) {
    const int ev_i = ds.samples[static_cast<std::size_t>(i)].event_id;
    sim(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const int ev_j = ds.samples[static_cast<std::size_t>(j)].event_id;
      // ||zi - zj||^2 = |zi|^2 + |zj|^2 - 2 zi.zj
      const double dist = sq[i] + sq[j] - sim(i, j);
      const double value = beta * att(ev_i, ev_j) - dist;
      sim(i, j) = value;
      sim(j, i) = value;
    }
  }
  return sim;
}

namespace {

// Merge engine. Clusters are identified by their smallest member sample
// index; average linkage is maintained incrementally:
//   S(a+b, c) = (|a| S(a,c) + |b| S(b,c)) / (|a| + |b|)
// A per-cluster best-partner cache keeps the scan for the global best pair
// near O(n) per merge.
class AverageLinkage {
 public:
  explicit AverageLinkage(const Mat& sim)
      : n_(static_cast<int>(sim.rows())),
        sim_(sim),
        size_(static_cast<std::size_t>(n_), 1),
        active_(static_cast<std::size_t>(n_), true),
        best_sim_(static_cast<std::size_t>(n_)),
        best_partner_(static_cast<std::size_t>(n_), -1),
        parent_(static_cast<std::size_t>(n_)) {
    if (sim.rows() != sim.cols())
      throw std::invalid_argument("agglomerative_cluster: similarity matrix not square");
    std::iota(parent_.begin(), parent_.end(), 0);
    for (int i = 0; i < n_; ++i) refresh_best(i);
  }

  // Merges until `target` clusters remain.
  void merge_down_to(int target, int active_count) {
    while (active_count > target) {
      const auto [a, b] = global_best();
      merge(a, b);
      --active_count;
    }
  }

  std::vector<int> snapshot() const {
    // Canonical cluster numbering: by increasing cluster id.
    std::vector<int> roots;
    for (int i = 0; i < n_; ++i)
      if (active_[static_cast<std::size_t>(i)]) roots.push_back(i);
    std::vector<int> index_of(static_cast<std::size_t>(n_), -1);
    for (std::size_t c = 0; c < roots.size(); ++c)
      index_of[static_cast<std::size_t>(roots[c])] = static_cast<int>(c);
    std::vector<int> membership(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i)
      membership[static_cast<std::size_t>(i)] = index_of[static_cast<std::size_t>(find(i))];
    return membership;
  }

 private:
  int find(int i) const {
    while (parent_[static_cast<std::size_t>(i)] != i)
      i = parent_[static_cast<std::size_t>(i)];
    return i;
  }

  // Best partner for cluster i under (similarity desc, partner id asc).
  void refresh_best(int i) {
    double best = -std::numeric_limits<double>::infinity();
    int who = -1;
    for (int j = 0; j < n_; ++j) {
      if (j == i || !active_[static_cast<std::size_t>(j)]) continue;
      const double s = sim_(i, j);
      if (s > best) {
        best = s;
        who = j;
      }
    }
    best_sim_[static_cast<std::size_t>(i)] = best;
    best_partner_[static_cast<std::size_t>(i)] = who;
  }

  std::pair<int, int> global_best() const {
    double best = -std::numeric_limits<double>::infinity();
    int a = -1, b = -1;
    for (int i = 0; i < n_; ++i) {
      if (!active_[static_cast<std::size_t>(i)]) continue;
      const int j = best_partner_[static_cast<std::size_t>(i)];
      if (j < 0) continue;
      const double s = best_sim_[static_cast<std::size_t>(i)];
      const int lo = std::min(i, j), hi = std::max(i, j);
      if (s > best || (s == best && (lo < a || (lo == a && hi < b)))) {
        best = s;
        a = lo;
        b = hi;
      }
    }
    return {a, b};
  }

  void merge(int a, int b) {
    // a < b; the merged cluster keeps id a.
    const double na = static_cast<double>(size_[static_cast<std::size_t>(a)]);
    const double nb = static_cast<double>(size_[static_cast<std::size_t>(b)]);
    const double wa = na / (na + nb), wb = nb / (na + nb);
    for (int c = 0; c < n_; ++c) {
      if (!active_[static_cast<std::size_t>(c)] || c == a || c == b) continue;
      const double s = wa * sim_(a, c) + wb * sim_(b, c);
      sim_(a, c) = s;
      sim_(c, a) = s;
    }
    active_[static_cast<std::size_t>(b)] = false;
    size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
    parent_[static_cast<std::size_t>(b)] = a;

    refresh_best(a);
    for (int c = 0; c < n_; ++c) {
      if (!active_[static_cast<std::size_t>(c)] || c == a) continue;
      const int p = best_partner_[static_cast<std::size_t>(c)];
      if (p == a || p == b) {
        refresh_best(c);
      } else if (sim_(c, a) > best_sim_[static_cast<std::size_t>(c)] ||
                 (sim_(c, a) == best_sim_[static_cast<std::size_t>(c)] && a < p)) {
        best_sim_[static_cast<std::size_t>(c)] = sim_(c, a);
        best_partner_[static_cast<std::size_t>(c)] = a;
      }
    }
  }

  int n_;
  Mat sim_;  // working copy, collapsed in place
  std::vector<int> size_;
  std::vector<bool> active_;
  std::vector<double> best_sim_;
  std::vector<int> best_partner_;
  std::vector<int> parent_;
};

}  // namespace

ClusterSet agglomerative_cluster(const Mat& sim, int g) {
  std::vector<ClusterSet> cuts = agglomerative_cluster_cuts(sim, {g});
  return std::move(cuts.front());
}

std::vector<ClusterSet> agglomerative_cluster_cuts(const Mat& sim,
                                                   const std::vector<int>& gs) {
  const int n = static_cast<int>(sim.rows());
  if (gs.empty())
    throw std::invalid_argument("agglomerative_cluster: no cluster counts requested");
  for (int g : gs) {
    if (g < 1 || g > n)
      throw std::invalid_argument("agglomerative_cluster: g = " + std::to_string(g) +
                                  " outside [1, n = " + std::to_string(n) + "]");
  }

  std::vector<int> order(gs.begin(), gs.end());
  std::sort(order.begin(), order.end(), std::greater<int>());

  AverageLinkage engine(sim);
  int active = n;
  std::vector<std::pair<int, std::vector<int>>> snapshots;
  for (int g : order) {
    engine.merge_down_to(g, active);
    active = g;
    snapshots.emplace_back(g, engine.snapshot());
  }

  std::vector<ClusterSet> out;
  out.reserve(gs.size());
  for (int g : gs) {
    const auto it = std::find_if(snapshots.begin(), snapshots.end(),
                                 [g](const auto& s) { return s.first == g; });
    ClusterSet cs;
    cs.g = g;
    cs.membership = it->second;
    out.push_back(std::move(cs));
  }
  return out;
}

}  // namespace crosstune
