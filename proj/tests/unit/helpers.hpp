#pragma once

#include <vector>

#include "crosstune/rng.hpp"
#include "crosstune/types.hpp"

namespace test_helpers {

using namespace crosstune;

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline Vec unit(std::initializer_list<double> xs) {
  Vec v = vec(xs);
  return v / v.norm();
}

/// Tiny hand-built dataset: every sample row i belongs to events[owner[i]],
/// attendance is whatever the caller provides.
inline Dataset make_dataset(int m, const std::vector<int>& event_of_sample,
                            const Mat& features,
                            const std::vector<Vec>& attendance) {
  Dataset ds;
  for (int j = 0; j < m; ++j) {
    char mac[18];
    std::snprintf(mac, sizeof(mac), "02:00:00:00:00:%02x", j);
    ds.identities.push_back(Identity{j, "id_" + std::to_string(j), mac});
  }
  const int h = static_cast<int>(attendance.size());
  for (int k = 0; k < h; ++k) {
    Event e;
    e.event_id = k;
    e.slot_index = k % 12;
    e.day = k / 12;
    e.location = "lab";
    e.attendance = attendance[static_cast<std::size_t>(k)];
    ds.events.push_back(std::move(e));
  }
  ds.features = features;
  ds.dim = static_cast<int>(features.cols());
  for (std::size_t i = 0; i < event_of_sample.size(); ++i) {
    FaceSample s;
    s.sample_id = static_cast<std::int64_t>(i);
    s.event_id = event_of_sample[i];
    ds.samples.push_back(s);
    ds.events[static_cast<std::size_t>(event_of_sample[i])].sample_rows.push_back(
        static_cast<int>(i));
  }
  return ds;
}

/// Random L2-normalized rows.
inline Mat random_unit_rows(Rng& rng, int n, int d) {
  Mat m(n, d);
  for (int i = 0; i < n; ++i) {
    double norm = 0.0;
    do {
      for (int j = 0; j < d; ++j) m(i, j) = rng.gaussian();
      norm = m.row(i).norm();
    } while (norm <= 0.0);
    m.row(i) /= norm;
  }
  return m;
}

}  // namespace test_helpers
