#include "crosstune/association.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace crosstune {

EventVector cluster_event_vector(const std::vector<int>& cluster_rows,
                                 const Dataset& ds, int h) {
  EventVector bits(static_cast<std::size_t>(h), 0);
  for (int row : cluster_rows) {
    const int ev = ds.samples[static_cast<std::size_t>(row)].event_id;
    if (ev < 0 || ev >= h)
      throw std::invalid_argument("cluster_event_vector: event id out of range");
    bits[static_cast<std::size_t>(ev)] = 1;
  }
  return bits;
}

EventVector device_event_vector(const std::vector<AttendanceVector>& attendance,
                                int identity, double binarize_threshold) {
  if (!(binarize_threshold > 0.0 && binarize_threshold < 1.0))
    throw std::invalid_argument("device_event_vector: threshold must be in (0,1)");
  EventVector bits(attendance.size(), 0);
  for (std::size_t k = 0; k < attendance.size(); ++k)
    bits[k] = attendance[k][identity] >= binarize_threshold ? 1 : 0;
  return bits;
}

double assignment_cost(const EventVector& r_c, const EventVector& r_l) {
  if (r_c.size() != r_l.size())
    throw std::invalid_argument("assignment_cost: event vectors have different lengths");
  long long acc = 0;
  for (std::size_t k = 0; k < r_c.size(); ++k) {
    const int d = static_cast<int>(r_c[k]) - static_cast<int>(r_l[k]);
    acc += static_cast<long long>(d) * d;
  }
  return static_cast<double>(acc);
}

namespace {

// Shortest-augmenting-path Hungarian algorithm with dual potentials on the
// padded square matrix. Returns matched column per row plus the final duals,
// which satisfy complementary slackness (reduced cost 0 on matched edges).
struct HungarianState {
  std::vector<int> match_col;  // per row
  std::vector<int> match_row;  // per col
  std::vector<double> u, v;    // row / col potentials
};

HungarianState solve_square(const Mat& cost) {
  const int n = static_cast<int>(cost.rows());
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
  const double inf = std::numeric_limits<double>::infinity();

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<bool> used(static_cast<std::size_t>(n) + 1, false);
    do {
      used[static_cast<std::size_t>(j0)] = true;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  HungarianState s;
  s.match_col.assign(static_cast<std::size_t>(n), -1);
  s.match_row.assign(static_cast<std::size_t>(n), -1);
  s.u.assign(static_cast<std::size_t>(n), 0.0);
  s.v.assign(static_cast<std::size_t>(n), 0.0);
  for (int j = 1; j <= n; ++j) {
    const int i = p[static_cast<std::size_t>(j)];
    s.match_col[static_cast<std::size_t>(i - 1)] = j - 1;
    s.match_row[static_cast<std::size_t>(j - 1)] = i - 1;
  }
  for (int i = 1; i <= n; ++i) s.u[static_cast<std::size_t>(i - 1)] = u[static_cast<std::size_t>(i)];
  for (int j = 1; j <= n; ++j) s.v[static_cast<std::size_t>(j - 1)] = v[static_cast<std::size_t>(j)];
  return s;
}

// Tie canonicalization. An edge (i, j) with zero reduced cost belongs to
// some minimum matching iff the zero-reduced-cost alternating graph has a
// path from column j back to row i; rotating the matching along that path
// keeps the total cost and the duals valid. Rows are fixed in order, each to
// the smallest eligible identity (dummies last), which yields the
// lexicographically smallest optimal assignment.
class LexCanonicalizer {
 public:
  LexCanonicalizer(const Mat& cost, HungarianState state)
      : cost_(cost),
        n_(static_cast<int>(cost.rows())),
        s_(std::move(state)),
        fixed_row_(static_cast<std::size_t>(n_), false),
        fixed_col_(static_cast<std::size_t>(n_), false) {}

  std::vector<int> run(int m) {
    for (int i = 0; i < n_; ++i) {
      const int current = s_.match_col[static_cast<std::size_t>(i)];
      int chosen = -1;
      if (current >= m) {
        // Already on a dummy: a smaller column can only be a real identity.
        for (int j = 0; j < m && chosen < 0; ++j)
          if (try_candidate(i, j)) chosen = j;
        if (chosen < 0) chosen = current;
      } else {
        for (int j = 0; j < current && chosen < 0; ++j)
          if (try_candidate(i, j)) chosen = j;
        if (chosen < 0) chosen = current;
      }
      fixed_row_[static_cast<std::size_t>(i)] = true;
      fixed_col_[static_cast<std::size_t>(chosen)] = true;
    }
    return s_.match_col;
  }

 private:
  double reduced_cost(int i, int j) const {
    return cost_(i, j) - s_.u[static_cast<std::size_t>(i)] - s_.v[static_cast<std::size_t>(j)];
  }

  bool tight(int i, int j) const {
    const double rc = reduced_cost(i, j);
    return std::abs(rc) <= 1e-9 * (1.0 + std::abs(cost_(i, j)));
  }

  // Attempts to rotate the matching so that row i is matched to column j.
  bool try_candidate(int i, int j) {
    if (fixed_col_[static_cast<std::size_t>(j)]) return false;
    if (s_.match_col[static_cast<std::size_t>(i)] == j) return true;
    if (!tight(i, j)) return false;

    // BFS over the zero graph: col -> its matched row, row -> tight unmatched
    // cols. Fixed rows/cols must keep their matches and are not traversed.
    std::vector<int> col_parent_row(static_cast<std::size_t>(n_), -2);
    std::deque<int> row_queue;
    const int r0 = s_.match_row[static_cast<std::size_t>(j)];
    if (r0 < 0 || fixed_row_[static_cast<std::size_t>(r0)]) return false;
    col_parent_row[static_cast<std::size_t>(j)] = -1;  // path start
    row_queue.push_back(r0);
    std::vector<int> row_entered_from(static_cast<std::size_t>(n_), -1);
    row_entered_from[static_cast<std::size_t>(r0)] = j;

    bool found = i == r0;
    while (!found && !row_queue.empty()) {
      const int r = row_queue.front();
      row_queue.pop_front();
      for (int c = 0; c < n_; ++c) {
        if (fixed_col_[static_cast<std::size_t>(c)]) continue;
        if (col_parent_row[static_cast<std::size_t>(c)] != -2) continue;
        if (c == s_.match_col[static_cast<std::size_t>(r)]) continue;
        if (!tight(r, c)) continue;
        col_parent_row[static_cast<std::size_t>(c)] = r;
        const int r2 = s_.match_row[static_cast<std::size_t>(c)];
        if (r2 < 0 || fixed_row_[static_cast<std::size_t>(r2)]) continue;
        if (row_entered_from[static_cast<std::size_t>(r2)] >= 0) continue;
        row_entered_from[static_cast<std::size_t>(r2)] = c;
        if (r2 == i) {
          found = true;
          break;
        }
        row_queue.push_back(r2);
      }
    }
    if (!found) return false;

    // Rotate: every column on the path is rematched to the row that
    // discovered it, and row i takes the candidate column j.
    int col = row_entered_from[static_cast<std::size_t>(i)];
    while (col_parent_row[static_cast<std::size_t>(col)] != -1) {
      const int r = col_parent_row[static_cast<std::size_t>(col)];
      const int next_col = row_entered_from[static_cast<std::size_t>(r)];
      s_.match_col[static_cast<std::size_t>(r)] = col;
      s_.match_row[static_cast<std::size_t>(col)] = r;
      col = next_col;
    }
    s_.match_col[static_cast<std::size_t>(i)] = j;
    s_.match_row[static_cast<std::size_t>(j)] = i;
    return true;
  }

  const Mat& cost_;
  int n_;
  HungarianState s_;
  std::vector<bool> fixed_row_, fixed_col_;
};

}  // namespace

Assignment hungarian_assign(const Mat& cost) {
  const int g = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  if (g < m)
    throw std::invalid_argument("hungarian_assign: need at least as many clusters as identities (g=" +
                                std::to_string(g) + ", m=" + std::to_string(m) + ")");
  if (g == 0) throw std::invalid_argument("hungarian_assign: empty cost matrix");
  if (!cost.allFinite())
    throw std::invalid_argument("hungarian_assign: cost matrix has non-finite entries");

  // Pad with g - m zero-cost dummy columns.
  Mat padded = Mat::Zero(g, g);
  padded.leftCols(m) = cost;

  HungarianState state = solve_square(padded);
  LexCanonicalizer canon(padded, std::move(state));
  const std::vector<int> match = canon.run(m);

  Assignment out;
  out.cluster_to_identity.assign(static_cast<std::size_t>(g), std::nullopt);
  for (int i = 0; i < g; ++i) {
    const int j = match[static_cast<std::size_t>(i)];
    if (j < m) {
      out.cluster_to_identity[static_cast<std::size_t>(i)] = j;
      out.total_cost += cost(i, j);
    }
  }
  return out;
}

}  // namespace crosstune
