#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crosstune {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Truth marker for a captured subject with no registered device.
inline constexpr int kNonPoi = -1;

/// A registered subject. Indices are dense in [0, m); the MAC string is the
/// canonical lower-case colon-separated form and only matters at ingestion.
struct Identity {
  int index = 0;
  std::string name;
  std::string mac;
};

/// One detected face: a row in Dataset::features plus the event it was
/// captured in. `truth` is only populated by the simulator / evaluation data
/// (kNonPoi for subjects outside the identity set).
struct FaceSample {
  std::int64_t sample_id = 0;
  int event_id = 0;
  std::optional<int> truth;
};

/// Per-event, per-identity attendance belief; binary after ingestion,
/// fractional once the update loop runs. Entries stay in [0, 1].
using AttendanceVector = Vec;

/// A (day, timeslot, location) bucket holding face samples and the
/// attendance belief over the m identities.
struct Event {
  int event_id = 0;
  int slot_index = 0;
  std::int64_t day = 0;  // days since epoch (UTC)
  std::string location;
  std::vector<int> sample_rows;  // row indices into Dataset::samples
  AttendanceVector attendance;
};

/// Binary presence-across-events signature of an image cluster or a device.
using EventVector = std::vector<std::uint8_t>;

/// Per-image probability distribution over the m identities. vote_count == 0
/// flags a non-POI candidate (all-zero probs, excluded from training).
struct SoftLabel {
  Vec probs;
  int vote_count = 0;

  bool non_poi_candidate() const { return vote_count == 0; }
};

struct Dataset {
  std::vector<Identity> identities;
  std::vector<Event> events;
  std::vector<FaceSample> samples;  // ordered by sample_id
  Mat features;                     // n x d, row i belongs to samples[i]
  int dim = 0;

  int num_identities() const { return static_cast<int>(identities.size()); }
  int num_events() const { return static_cast<int>(events.size()); }
  int num_samples() const { return static_cast<int>(samples.size()); }
};

enum class AttendanceEstimator {
  kPresence,  // strongest argmax-consistent soft mass per identity (default)
  kMeanMax,   // mean of soft labels, divided by the max entry
  kMeanSum,   // mean of soft labels (already sums to <= 1)
};

struct HyperParams {
  double beta = 0.02;            // attendance weight in the joint similarity
  double gamma = 0.05;           // attendance update rate
  double xi = 0.01;              // RMS convergence threshold
  double lambda_stoc = 0.01;     // stochastic-center-loss weight
  int g_mult_lo = 2;             // cluster-count sweep: g = k*m, k in [lo, hi]
  int g_mult_hi = 5;
  double rss_threshold_dbm = -55.0;
  int slot_hours = 2;
  double binarize_threshold = 0.5;
  int max_iterations = 20;
  AttendanceEstimator attendance_estimator = AttendanceEstimator::kPresence;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct FuzzyOverlap {
  double intersection_mass = 0.0;
  double union_mass = 0.0;
};

/// Elementwise min/max masses of two attendance vectors. Coincides with
/// logical AND/OR counts on binary inputs and stays defined once attendance
/// becomes fractional.
FuzzyOverlap fuzzy_overlap(const AttendanceVector& a, const AttendanceVector& b);

/// Report-only invariant check; empty result iff the dataset is well-formed.
std::vector<std::string> validate_dataset(const Dataset& ds);

const char* attendance_estimator_name(AttendanceEstimator e);
std::optional<AttendanceEstimator> attendance_estimator_from_name(
    const std::string& name);

}  // namespace crosstune
