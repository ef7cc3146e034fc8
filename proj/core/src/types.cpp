#include "crosstune/types.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace crosstune {

FuzzyOverlap fuzzy_overlap(const AttendanceVector& a, const AttendanceVector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("fuzzy_overlap: attendance vectors have lengths " +
                                std::to_string(a.size()) + " and " +
                                std::to_string(b.size()));
  }
  FuzzyOverlap out;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.intersection_mass += std::min(a[i], b[i]);
    out.union_mass += std::max(a[i], b[i]);
  }
  return out;
}

void HyperParams::validate() const {
  if (beta < 0.0) throw std::invalid_argument("hyper.beta must be >= 0");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("hyper.gamma must be in (0,1)");
  if (!(xi > 0.0)) throw std::invalid_argument("hyper.xi must be > 0");
  if (lambda_stoc < 0.0)
    throw std::invalid_argument("hyper.lambda_stoc must be >= 0");
  if (g_mult_lo < 1 || g_mult_hi < g_mult_lo)
    throw std::invalid_argument("hyper.g_multipliers must be a non-empty range of integers >= 1");
  if (!std::isfinite(rss_threshold_dbm))
    throw std::invalid_argument("hyper.rss_threshold_dbm must be finite");
  if (slot_hours < 1 || 24 % slot_hours != 0)
    throw std::invalid_argument("hyper.slot_hours must divide 24");
  if (!(binarize_threshold > 0.0 && binarize_threshold < 1.0))
    throw std::invalid_argument("hyper.binarize_threshold must be in (0,1)");
  if (max_iterations < 1)
    throw std::invalid_argument("hyper.max_iterations must be >= 1");
}

std::vector<std::string> validate_dataset(const Dataset& ds) {
  std::vector<std::string> violations;
  auto report = [&violations](const std::string& msg) { violations.push_back(msg); };

  const int m = ds.num_identities();
  const int h = ds.num_events();
  const int n = ds.num_samples();

  if (m < 2) report("dataset has " + std::to_string(m) + " identities, need >= 2");
  if (h < 1) report("dataset has no events");

  std::set<std::string> macs;
  for (int j = 0; j < m; ++j) {
    if (ds.identities[j].index != j)
      report("identity at position " + std::to_string(j) + " has index " +
             std::to_string(ds.identities[j].index) + " (indices must be dense)");
    if (!macs.insert(ds.identities[j].mac).second)
      report("duplicate mac " + ds.identities[j].mac);
  }

  if (ds.features.rows() != n)
    report("feature matrix has " + std::to_string(ds.features.rows()) +
           " rows for " + std::to_string(n) + " samples");
  if (ds.features.cols() != ds.dim)
    report("feature matrix has " + std::to_string(ds.features.cols()) +
           " columns, dim says " + std::to_string(ds.dim));

  std::set<std::int64_t> sample_ids;
  for (int i = 0; i < n; ++i) {
    const FaceSample& s = ds.samples[i];
    if (!sample_ids.insert(s.sample_id).second)
      report("duplicate sample_id " + std::to_string(s.sample_id));
    if (s.event_id < 0 || s.event_id >= h)
      report("sample " + std::to_string(s.sample_id) + " references event " +
             std::to_string(s.event_id) + " out of range");
    if (s.truth && *s.truth != kNonPoi && (*s.truth < 0 || *s.truth >= m))
      report("sample " + std::to_string(s.sample_id) + " truth index out of range");
    if (i < ds.features.rows()) {
      if (!ds.features.row(i).allFinite())
        report("sample " + std::to_string(s.sample_id) + " has non-finite feature entries");
    }
  }

  for (int k = 0; k < h; ++k) {
    const Event& e = ds.events[k];
    if (e.event_id != k)
      report("event at position " + std::to_string(k) + " has event_id " +
             std::to_string(e.event_id));
    if (e.attendance.size() != m)
      report("event " + std::to_string(k) + " attendance length " +
             std::to_string(e.attendance.size()) + " != m");
    bool any_attendance = false;
    for (Eigen::Index j = 0; j < e.attendance.size(); ++j) {
      const double u = e.attendance[j];
      if (!(u >= 0.0 && u <= 1.0)) {
        std::ostringstream os;
        os << "event " << k << " attendance[" << j << "] = " << u
           << " outside [0,1]";
        report(os.str());
      }
      if (u > 0.0) any_attendance = true;
    }
    if (e.sample_rows.empty() && !any_attendance)
      report("event " + std::to_string(k) + " has neither samples nor attendance");
    for (int r : e.sample_rows) {
      if (r < 0 || r >= n)
        report("event " + std::to_string(k) + " references sample row " +
               std::to_string(r) + " out of range");
      else if (ds.samples[r].event_id != k)
        report("sample row " + std::to_string(r) + " disagrees with event " +
               std::to_string(k) + " about membership");
    }
  }

  return violations;
}

const char* attendance_estimator_name(AttendanceEstimator e) {
  switch (e) {
    case AttendanceEstimator::kPresence: return "presence";
    case AttendanceEstimator::kMeanMax: return "mean_max";
    case AttendanceEstimator::kMeanSum: return "mean_sum";
  }
  return "presence";
}

std::optional<AttendanceEstimator> attendance_estimator_from_name(
    const std::string& name) {
  if (name == "presence") return AttendanceEstimator::kPresence;
  if (name == "mean_max") return AttendanceEstimator::kMeanMax;
  if (name == "mean_sum") return AttendanceEstimator::kMeanSum;
  return std::nullopt;
}

}  // namespace crosstune
