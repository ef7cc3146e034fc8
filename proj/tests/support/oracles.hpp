#pragma once

// Independent reference implementations used by the test suites. These stay
// deliberately naive: full recomputation, no caching, no incremental updates,
// so they share no code path with the library.

#include <algorithm>
#include <functional>
#include <limits>
#include <vector>

#include "crosstune/types.hpp"

namespace test_oracles {

using crosstune::Mat;

/// Naive average-linkage agglomeration: recomputes every cluster-pair
/// average from the base matrix at every step; merges the highest average,
/// ties broken by the lexicographically smallest (min id, max id) pair where
/// a cluster's id is its smallest member index. Returns sorted groups.
inline std::vector<std::vector<int>> naive_average_linkage(const Mat& sim, int g) {
  const int n = static_cast<int>(sim.rows());
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < n; ++i) clusters.push_back({i});

  while (static_cast<int>(clusters.size()) > g) {
    double best = -std::numeric_limits<double>::infinity();
    std::pair<int, int> best_ids{-1, -1};
    std::pair<std::size_t, std::size_t> best_pos{0, 0};
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        double sum = 0.0;
        for (int i : clusters[a])
          for (int j : clusters[b]) sum += sim(i, j);
        const double avg = sum / (static_cast<double>(clusters[a].size()) *
                                  static_cast<double>(clusters[b].size()));
        const int id_a = *std::min_element(clusters[a].begin(), clusters[a].end());
        const int id_b = *std::min_element(clusters[b].begin(), clusters[b].end());
        const std::pair<int, int> ids{std::min(id_a, id_b), std::max(id_a, id_b)};
        if (avg > best || (avg == best && ids < best_ids)) {
          best = avg;
          best_ids = ids;
          best_pos = {a, b};
        }
      }
    }
    auto& [a, b] = best_pos;
    clusters[a].insert(clusters[a].end(), clusters[b].begin(), clusters[b].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(b));
  }
  for (auto& c : clusters) std::sort(c.begin(), c.end());
  std::sort(clusters.begin(), clusters.end());
  return clusters;
}

/// Exhaustive assignment oracle: minimum total cost over all injective maps
/// of the m identities into the g clusters.
inline double brute_force_min_cost(const Mat& cost) {
  const int g = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> used(static_cast<std::size_t>(g), false);
  std::function<void(int, double)> recurse = [&](int j, double acc) {
    if (acc >= best) return;
    if (j == m) {
      best = acc;
      return;
    }
    for (int c = 0; c < g; ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      used[static_cast<std::size_t>(c)] = true;
      recurse(j + 1, acc + cost(c, j));
      used[static_cast<std::size_t>(c)] = false;
    }
  };
  recurse(0, 0.0);
  return best;
}

}  // namespace test_oracles
