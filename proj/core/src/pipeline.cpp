#include "crosstune/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "crosstune/log.hpp"
#include "crosstune/rng.hpp"
#include "crosstune/voting.hpp"

namespace crosstune {

const char* run_mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::kAutotune: return "autotune";
    case RunMode::kDeterministic: return "deterministic";
    case RunMode::kOneOff: return "one-off";
  }
  return "autotune";
}

std::optional<RunMode> run_mode_from_name(const std::string& name) {
  if (name == "autotune") return RunMode::kAutotune;
  if (name == "deterministic") return RunMode::kDeterministic;
  if (name == "one-off" || name == "one_off") return RunMode::kOneOff;
  return std::nullopt;
}

const char* exit_reason_name(ExitReason reason) {
  switch (reason) {
    case ExitReason::kConverged: return "converged";
    case ExitReason::kMaxIterations: return "max_iterations";
    case ExitReason::kOneOff: return "one_off";
  }
  return "converged";
}

AttendanceVector estimate_event_attendance(const std::vector<SoftLabel>& soft,
                                           const Event& event,
                                           const AttendanceVector& current,
                                           AttendanceEstimator estimator) {
  const Eigen::Index m = current.size();
  std::vector<int> voted;
  for (int row : event.sample_rows)
    if (soft[static_cast<std::size_t>(row)].vote_count > 0) voted.push_back(row);
  if (voted.empty()) return current;

  Vec u_hat = Vec::Zero(m);
  switch (estimator) {
    case AttendanceEstimator::kPresence: {
      // For each identity claimed by at least one voted sample, the
      // strongest soft mass among the claiming samples; identities nobody
      // claims keep their current belief (no visual evidence either way).
      // Binary attendance stays exactly binary on clean one-hot labels.
      u_hat = current;
      std::vector<bool> claimed(static_cast<std::size_t>(m), false);
      for (int row : voted) {
        const Vec& y = soft[static_cast<std::size_t>(row)].probs;
        int best = 0;
        for (Eigen::Index k = 1; k < m; ++k)
          if (y[k] > y[best]) best = static_cast<int>(k);
        if (!claimed[static_cast<std::size_t>(best)]) {
          claimed[static_cast<std::size_t>(best)] = true;
          u_hat[best] = y[best];
        } else {
          u_hat[best] = std::max(u_hat[best], y[best]);
        }
      }
      break;
    }
    case AttendanceEstimator::kMeanMax: {
      for (int row : voted) u_hat += soft[static_cast<std::size_t>(row)].probs;
      u_hat /= static_cast<double>(voted.size());
      const double peak = u_hat.maxCoeff();
      if (peak > 0.0) u_hat /= peak;
      break;
    }
    case AttendanceEstimator::kMeanSum: {
      for (int row : voted) u_hat += soft[static_cast<std::size_t>(row)].probs;
      u_hat /= static_cast<double>(voted.size());
      break;
    }
  }
  return u_hat.cwiseMax(0.0).cwiseMin(1.0);
}

AttendanceVector update_attendance(const AttendanceVector& u,
                                   const AttendanceVector& u_hat, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("update_attendance: gamma must be in (0,1)");
  if (u.size() != u_hat.size())
    throw std::invalid_argument("update_attendance: dimension mismatch");
  Vec next = u - gamma * (u - u_hat);
  return next.cwiseMax(0.0).cwiseMin(1.0);
}

double rms_change(const std::vector<AttendanceVector>& next,
                  const std::vector<AttendanceVector>& prev) {
  if (next.size() != prev.size())
    throw std::invalid_argument("rms_change: event counts differ");
  if (next.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < next.size(); ++k) {
    if (next[k].size() != prev[k].size())
      throw std::invalid_argument("rms_change: attendance lengths differ");
    acc += (next[k] - prev[k]).squaredNorm();
  }
  return std::sqrt(acc / static_cast<double>(next.size()));
}

namespace {

std::vector<SoftLabel> harden_all(const std::vector<SoftLabel>& soft) {
  std::vector<SoftLabel> out;
  out.reserve(soft.size());
  for (const SoftLabel& s : soft) {
    SoftLabel hardened;
    hardened.probs = Vec::Zero(s.probs.size());
    hardened.vote_count = s.vote_count;
    if (const auto id = harden(s)) hardened.probs[*id] = 1.0;
    out.push_back(std::move(hardened));
  }
  return out;
}

}  // namespace

RunResult run(const Dataset& ds, const HyperParams& hyper, RunMode mode,
              const TrainConfig& train_cfg) {
  hyper.validate();
  train_cfg.validate();

  const int m = ds.num_identities();

  RunResult result;
  result.mode = mode;
  result.adapter = AdapterModel::init(ds.dim, m, hyper.seed);

  // Embeddings are L2-normalized once; the identity adapter then reproduces
  // them exactly, so a one-off pass and iteration 1 see the same features.
  Mat raw = ds.features;
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    const double norm = raw.row(i).norm();
    if (norm <= 0.0)
      throw std::runtime_error("run: sample row " + std::to_string(i) +
                               " has a zero feature vector");
    raw.row(i) /= norm;
  }

  std::vector<AttendanceVector> attendance;
  attendance.reserve(ds.events.size());
  for (const Event& e : ds.events) attendance.push_back(e.attendance);

  const int max_tau = mode == RunMode::kOneOff ? 1 : hyper.max_iterations;
  ExitReason reason = mode == RunMode::kOneOff ? ExitReason::kOneOff
                                               : ExitReason::kMaxIterations;

  for (int tau = 1; tau <= max_tau; ++tau) {
    const Mat features = transform(raw, result.adapter);
    const VoteTally tally = sweep_and_vote(ds, features, attendance, hyper);
    std::vector<SoftLabel> soft = soft_labels(tally);
    if (mode == RunMode::kDeterministic) soft = harden_all(soft);

    IterationRecord record;
    record.tau = tau;
    record.soft = soft;

    if (mode == RunMode::kOneOff) {
      record.attendance = attendance;
      result.history.push_back(std::move(record));
      result.soft = std::move(soft);
      break;
    }

    std::vector<int> voted_rows;
    for (int i = 0; i < ds.num_samples(); ++i)
      if (soft[static_cast<std::size_t>(i)].vote_count > 0) voted_rows.push_back(i);

    TrainConfig iter_cfg = train_cfg;
    iter_cfg.seed = Rng::derive(train_cfg.seed, static_cast<std::uint64_t>(tau));
    TrainHistory train_history;
    result.adapter = train_adapter(raw, soft, voted_rows, result.adapter,
                                   iter_cfg, &train_history);
    TrainSummary summary;
    summary.initial_val_loss = train_history.initial_val_loss;
    summary.best_val_loss = train_history.best_val_loss;
    summary.best_epoch = train_history.best_epoch;
    summary.final_softmax_ce = train_history.final_train_parts.softmax_ce;
    summary.final_stoc_center = train_history.final_train_parts.stoc_center;
    record.training = summary;

    std::vector<AttendanceVector> next;
    next.reserve(attendance.size());
    for (std::size_t k = 0; k < attendance.size(); ++k) {
      const AttendanceVector u_hat = estimate_event_attendance(
          soft, ds.events[k], attendance[k], hyper.attendance_estimator);
      next.push_back(update_attendance(attendance[k], u_hat, hyper.gamma));
    }
    record.rms_change = rms_change(next, attendance);
    attendance = std::move(next);
    record.attendance = attendance;

    CT_INFO("iteration %d: rms_change %.6f, best val loss %.4f", tau,
            record.rms_change, summary.best_val_loss);

    const double change = record.rms_change;
    result.history.push_back(std::move(record));
    result.soft = std::move(soft);
    if (change <= hyper.xi) {
      reason = ExitReason::kConverged;
      break;
    }
  }

  result.attendance = std::move(attendance);
  result.exit_reason = reason;
  result.hard.reserve(result.soft.size());
  for (const SoftLabel& s : result.soft) result.hard.push_back(harden(s));
  return result;
}

}  // namespace crosstune
