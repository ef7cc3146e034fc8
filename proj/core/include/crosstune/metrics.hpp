#pragma once

#include <optional>
#include <vector>

#include "crosstune/model_update.hpp"
#include "crosstune/simulation.hpp"
#include "crosstune/types.hpp"

namespace crosstune {

struct LabelingMetrics {
  long long tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
};

/// Micro counts over samples. `pred` holds the hardened identity per sample
/// (nullopt = flagged non-POI); `truth` holds the true identity (kNonPoi for
/// unregistered subjects). tp: correct POI identity; fp: any POI prediction
/// that is wrong or hits a non-POI; fn: POI flagged non-POI; tn: non-POI
/// flagged non-POI. Zero denominators yield 0 by convention.
LabelingMetrics labeling_metrics(const std::vector<std::optional<int>>& pred,
                                 const std::vector<int>& truth);

/// m x m row-normalized confusion matrix (rows = truth, cols = prediction)
/// over POI-truth samples that carry a prediction. Rows of absent classes
/// stay zero.
Mat confusion_matrix(const std::vector<std::optional<int>>& pred,
                     const std::vector<int>& truth, int m);

/// Rank-k identification accuracy for k = 1..max_rank. Ties in the scores
/// are broken stably by identity index.
std::vector<double> cmc_curve(const Mat& scores, const std::vector<int>& truth,
                              int max_rank);

struct NoiseReportRow {
  int event_id = 0;
  int false_alarm_faces = 0;
  int false_alarm_devices = 0;
  int nonpoi_samples = 0;
};

/// Per-event counts of the three injected noise types.
std::vector<NoiseReportRow> noise_report(const NoiseAnnotations& annotations);

/// Head logits W * transform(z) + b per identity; requires a trained model.
Mat identify(const Mat& raw_features, const AdapterModel& model);

}  // namespace crosstune
