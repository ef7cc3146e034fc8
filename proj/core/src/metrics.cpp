#include "crosstune/metrics.hpp"

#include <algorithm>
#include <numeric>

namespace crosstune {

LabelingMetrics labeling_metrics(const std::vector<std::optional<int>>& pred,
                                 const std::vector<int>& truth) {
  if (pred.size() != truth.size())
    throw std::invalid_argument("labeling_metrics: prediction/truth length mismatch");
  LabelingMetrics m;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool is_poi = truth[i] != kNonPoi;
    if (pred[i].has_value()) {
      if (is_poi && *pred[i] == truth[i])
        ++m.tp;
      else
        ++m.fp;
    } else {
      if (is_poi)
        ++m.fn;
      else
        ++m.tn;
    }
  }
  m.precision = m.tp + m.fp > 0
                    ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp)
                    : 0.0;
  m.recall = m.tp + m.fn > 0
                 ? static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn)
                 : 0.0;
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  m.accuracy = pred.empty() ? 0.0
                            : static_cast<double>(m.tp + m.tn) /
                                  static_cast<double>(pred.size());
  return m;
}

Mat confusion_matrix(const std::vector<std::optional<int>>& pred,
                     const std::vector<int>& truth, int m) {
  if (pred.size() != truth.size())
    throw std::invalid_argument("confusion_matrix: prediction/truth length mismatch");
  Mat counts = Mat::Zero(m, m);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (truth[i] == kNonPoi || !pred[i].has_value()) continue;
    if (truth[i] < 0 || truth[i] >= m || *pred[i] < 0 || *pred[i] >= m)
      throw std::invalid_argument("confusion_matrix: label out of range");
    counts(truth[i], *pred[i]) += 1.0;
  }
  for (int r = 0; r < m; ++r) {
    const double total = counts.row(r).sum();
    if (total > 0.0) counts.row(r) /= total;
  }
  return counts;
}

std::vector<double> cmc_curve(const Mat& scores, const std::vector<int>& truth,
                              int max_rank) {
  const int n = static_cast<int>(scores.rows());
  const int m = static_cast<int>(scores.cols());
  if (static_cast<std::size_t>(n) != truth.size())
    throw std::invalid_argument("cmc_curve: scores/truth length mismatch");
  if (max_rank < 1 || max_rank > m)
    throw std::invalid_argument("cmc_curve: max_rank outside [1, m]");
  if (!scores.allFinite())
    throw std::invalid_argument("cmc_curve: non-finite scores");

  std::vector<long long> hits(static_cast<std::size_t>(max_rank), 0);
  std::vector<int> order(static_cast<std::size_t>(m));
  for (int i = 0; i < n; ++i) {
    if (truth[static_cast<std::size_t>(i)] < 0 ||
        truth[static_cast<std::size_t>(i)] >= m)
      throw std::invalid_argument("cmc_curve: truth index out of range");
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return scores(i, a) > scores(i, b);
    });
    for (int k = 0; k < max_rank; ++k) {
      if (order[static_cast<std::size_t>(k)] == truth[static_cast<std::size_t>(i)]) {
        for (int r = k; r < max_rank; ++r) ++hits[static_cast<std::size_t>(r)];
        break;
      }
    }
  }
  std::vector<double> curve(static_cast<std::size_t>(max_rank), 0.0);
  for (int k = 0; k < max_rank; ++k)
    curve[static_cast<std::size_t>(k)] =
        n > 0 ? static_cast<double>(hits[static_cast<std::size_t>(k)]) /
                    static_cast<double>(n)
              : 0.0;
  return curve;
}

std::vector<NoiseReportRow> noise_report(const NoiseAnnotations& annotations) {
  const std::size_t h = annotations.nonpoi_samples.size();
  if (annotations.false_alarm_faces.size() != h ||
      annotations.false_alarm_devices.size() != h)
    throw std::invalid_argument("noise_report: annotation arrays misaligned");
  std::vector<NoiseReportRow> rows;
  rows.reserve(h);
  for (std::size_t k = 0; k < h; ++k) {
    NoiseReportRow row;
    row.event_id = static_cast<int>(k);
    row.false_alarm_faces = static_cast<int>(annotations.false_alarm_faces[k].size());
    row.false_alarm_devices = static_cast<int>(annotations.false_alarm_devices[k].size());
    row.nonpoi_samples = annotations.nonpoi_samples[k];
    rows.push_back(row);
  }
  return rows;
}

Mat identify(const Mat& raw_features, const AdapterModel& model) {
  if (!model.trained)
    throw std::runtime_error("identify: adapter model has not been trained");
  const Mat adapted = transform(raw_features, model);
  return (adapted * model.W.transpose()).rowwise() + model.b.transpose();
}

}  // namespace crosstune
