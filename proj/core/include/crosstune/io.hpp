#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crosstune/metrics.hpp"
#include "crosstune/model_update.hpp"
#include "crosstune/pipeline.hpp"
#include "crosstune/simulation.hpp"
#include "crosstune/types.hpp"

namespace crosstune {

/// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double value);

// --- simulated dataset export (the same formats ingestion consumes) ---

void write_sniff_csv(const std::string& path, const SimOutput& sim);
void write_embeddings_jsonl(const std::string& path, const SimOutput& sim);
void write_identities_csv(const std::string& path,
                          const std::vector<Identity>& identities);
void write_truth_jsonl(const std::string& path, const Dataset& ds);
void write_annotations_json(const std::string& path, const NoiseAnnotations& ann);

NoiseAnnotations read_annotations_json(const std::string& path);

/// sample_id -> truth index (kNonPoi for unregistered subjects).
std::map<std::int64_t, int> read_truth_jsonl(const std::string& path);

// --- run outputs ---

void write_labels_jsonl(const std::string& path, const Dataset& ds,
                        const RunResult& result);

struct LabelRow {
  std::int64_t sample_id = 0;
  Vec soft;
  std::optional<int> hard;
  bool flag_non_poi = false;
};
std::vector<LabelRow> read_labels_jsonl(const std::string& path);

/// Optional external classifier scores for eval: CSV with header
/// `sample_id,score_0,...,score_{m-1}`, one row per sample.
struct ScoreRow {
  std::int64_t sample_id = 0;
  Vec scores;
};
std::vector<ScoreRow> read_scores_csv(const std::string& path);

void write_attendance_csv(const std::string& path, const Dataset& ds,
                          const std::vector<AttendanceVector>& attendance);
void write_history_json(const std::string& path, const RunResult& result,
                        const HyperParams& hyper);
void write_checkpoint_json(const std::string& path, const AdapterModel& model,
                           const HyperParams& hyper);
AdapterModel read_checkpoint_json(const std::string& path);

// --- metric outputs ---

void write_labeling_metrics_csv(const std::string& path, const LabelingMetrics& m);
void write_confusion_csv(const std::string& path, const Mat& confusion);
void write_cmc_csv(const std::string& path, const std::vector<double>& curve);
void write_noise_report_csv(const std::string& path,
                            const std::vector<NoiseReportRow>& rows);

struct SweepRow {
  double value = 0.0;
  double mean_f1 = 0.0;
  double std_f1 = 0.0;
  double mean_iterations = 0.0;
};
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

}  // namespace crosstune
