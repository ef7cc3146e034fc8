#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crosstune/types.hpp"

namespace crosstune {

struct SimConfig {
  int m_poi = 30;
  int n_nonpoi = 10;
  int dim = 32;
  int events = 100;
  double attend_prob = 0.3;
  int images_min = 3;  // images per attendance, inclusive range
  int images_max = 8;
  double cluster_spread = 0.1;
  double separation = 1.2;  // minimum pairwise angle between identity means, radians
  double nonpoi_presence_prob = 0.1;
  double false_alarm_face_rate = 0.0;    // device detections deleted, faces kept
  double false_alarm_device_rate = 0.0;  // faces deleted, device detections kept
  int slot_hours = 2;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Which (event, identity) entries a noise injection touched, plus the
/// per-event non-POI sample counts. This is the bookkeeping behind the
/// per-event noise report.
struct NoiseAnnotations {
  // one entry per event, aligned with Dataset::events
  std::vector<std::vector<int>> false_alarm_faces;    // identities whose device was dropped
  std::vector<std::vector<int>> false_alarm_devices;  // identities whose faces were dropped
  std::vector<int> nonpoi_samples;                    // count of injected non-POI samples

  static NoiseAnnotations empty(int h);
};

struct SimOutput {
  Dataset dataset;
  std::vector<AttendanceVector> clean_attendance;  // ground truth before noise
  NoiseAnnotations annotations;
  int slot_hours = 2;  // slot width the events were generated on
};

/// Draws identity means on the unit sphere with pairwise angle >= separation
/// and samples events: each POI attends each event with attend_prob and
/// contributes images_min..images_max noisy normalized copies of its mean.
/// Attendance vectors are the exact truth; events nobody attends are
/// discarded. Throws after bounded retries when the separation is infeasible.
SimOutput synth_dataset(const SimConfig& cfg);

/// Deletes each attending identity's device detection with probability
/// `rate` while keeping its face samples.
void inject_false_alarm_faces(SimOutput& sim, double rate, std::uint64_t seed);

/// Deletes each attending identity's face samples with probability `rate`
/// while keeping the device detection.
void inject_false_alarm_devices(SimOutput& sim, double rate, std::uint64_t seed);

/// Adds `count` unregistered identities that appear in each event with
/// presence_prob and contribute samples like a POI (truth = kNonPoi).
/// Attendance vectors are untouched.
void inject_nonpoi(SimOutput& sim, int count, double presence_prob,
                   std::uint64_t seed, const SimConfig& cfg);

/// Runs synth_dataset and the three injections as configured, then drops
/// events that lost both modalities.
SimOutput simulate(const SimConfig& cfg);

}  // namespace crosstune
