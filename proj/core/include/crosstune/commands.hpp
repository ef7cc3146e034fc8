#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crosstune/config.hpp"
#include "crosstune/metrics.hpp"
#include "crosstune/pipeline.hpp"

namespace crosstune {

/// simulate: writes sniff.csv, embeddings.jsonl, identities.csv,
/// truth.jsonl and annotations.json into out_dir.
void cmd_simulate(const RunConfig& cfg, const std::string& out_dir);

struct RunOutcome {
  RunResult result;
  LabelingMetrics metrics_vs_truth;  // only filled when truth is available
  bool have_truth = false;
};

/// run: ingests data_dir (sniff.csv + embeddings.jsonl + identities.csv),
/// runs the pipeline in `mode`, and writes labels.jsonl, attendance.csv,
/// checkpoint.json and history.json into out_dir.
RunOutcome cmd_run(const RunConfig& cfg, const std::string& data_dir,
                   RunMode mode, const std::string& out_dir);

/// eval: scores run outputs in run_dir against truth.jsonl and writes
/// labeling_metrics.csv, confusion.csv, cmc.csv and, when annotations.json
/// sits next to the truth file, noise_report.csv.
LabelingMetrics cmd_eval(const std::string& run_dir, const std::string& truth_path,
                         const std::string& out_dir);

enum class SweepAxis { kFaces, kDevices, kNonPoi };

std::optional<SweepAxis> sweep_axis_from_name(const std::string& name);
const char* sweep_axis_name(SweepAxis axis);

struct SweepOptions {
  SweepAxis axis = SweepAxis::kDevices;
  std::vector<double> values;
  int repeats = 3;
  int jobs = 1;
};

/// sweep: simulate -> run -> eval per (value, repeat), one subdirectory per
/// cell, plus the aggregated sweep.csv (value, mean F1, std, mean iterations).
void cmd_sweep(const RunConfig& cfg, const SweepOptions& opts,
               const std::string& out_dir);

}  // namespace crosstune
