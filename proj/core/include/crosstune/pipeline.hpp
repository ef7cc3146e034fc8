#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crosstune/model_update.hpp"
#include "crosstune/types.hpp"

namespace crosstune {

enum class RunMode {
  kAutotune,       // soft labels + stochastic center loss
  kDeterministic,  // labels hardened to one-hot before training and updates
  kOneOff,         // single labeling pass, no training, no attendance update
};

const char* run_mode_name(RunMode mode);
std::optional<RunMode> run_mode_from_name(const std::string& name);

enum class ExitReason { kConverged, kMaxIterations, kOneOff };

const char* exit_reason_name(ExitReason reason);

struct TrainSummary {
  double initial_val_loss = 0.0;
  double best_val_loss = 0.0;
  int best_epoch = 0;
  double final_softmax_ce = 0.0;
  double final_stoc_center = 0.0;
};

struct IterationRecord {
  int tau = 0;
  double rms_change = 0.0;
  std::vector<SoftLabel> soft;                // labels used in this iteration
  std::vector<AttendanceVector> attendance;   // u after this iteration's update
  std::optional<TrainSummary> training;
};

struct RunResult {
  std::vector<SoftLabel> soft;             // final labels
  std::vector<std::optional<int>> hard;    // final hardened labels
  AdapterModel adapter;
  std::vector<AttendanceVector> attendance;
  std::vector<IterationRecord> history;
  ExitReason exit_reason = ExitReason::kOneOff;
  RunMode mode = RunMode::kOneOff;
};

/// Estimates the attendance of one event from its voted samples' soft
/// labels; falls back to `current` when the event has no voted sample.
/// kPresence: strongest soft mass among the samples claiming an identity;
///            unclaimed identities keep their current belief.
/// kMeanMax:  mean soft label divided by its maximum entry.
/// kMeanSum:  plain mean soft label.
AttendanceVector estimate_event_attendance(const std::vector<SoftLabel>& soft,
                                           const Event& event,
                                           const AttendanceVector& current,
                                           AttendanceEstimator estimator);

/// u' = u - gamma (u - u_hat), clamped to [0, 1].
AttendanceVector update_attendance(const AttendanceVector& u,
                                   const AttendanceVector& u_hat, double gamma);

/// sqrt( (1/h) sum_k ||u'_k - u_k||^2 )
double rms_change(const std::vector<AttendanceVector>& next,
                  const std::vector<AttendanceVector>& prev);

/// Runs the full labeling/update loop (or a single pass for kOneOff) and
/// returns the final labels, adapter, attendance and per-iteration history.
RunResult run(const Dataset& ds, const HyperParams& hyper, RunMode mode,
              const TrainConfig& train_cfg);

}  // namespace crosstune
