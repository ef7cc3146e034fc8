#include "crosstune/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <thread>

#include "crosstune/ingestion.hpp"
#include "crosstune/io.hpp"
#include "crosstune/log.hpp"
#include "crosstune/metrics.hpp"
#include "crosstune/rng.hpp"

namespace crosstune {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

Dataset ingest_dir(const std::string& data_dir, const HyperParams& hyper) {
  const std::string identities_path = join(data_dir, "identities.csv");
  const std::string sniff_path = join(data_dir, "sniff.csv");
  const std::string embeddings_path = join(data_dir, "embeddings.jsonl");
  const auto identities = parse_identities(identities_path);
  const auto sniffs =
      filter_by_rss(parse_sniff_log(sniff_path), hyper.rss_threshold_dbm);
  const auto embeddings = parse_embeddings(embeddings_path);
  return segment_events(embeddings, sniffs, identities, hyper.slot_hours);
}

std::vector<int> truth_vector(const Dataset& ds,
                              const std::map<std::int64_t, int>& truth) {
  std::vector<int> out;
  out.reserve(ds.samples.size());
  for (const FaceSample& s : ds.samples) {
    const auto it = truth.find(s.sample_id);
    if (it == truth.end())
      throw std::runtime_error("truth file is missing sample_id " +
                               std::to_string(s.sample_id));
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

void cmd_simulate(const RunConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  const SimOutput sim = simulate(cfg.sim);
  write_identities_csv(join(out_dir, "identities.csv"), sim.dataset.identities);
  write_sniff_csv(join(out_dir, "sniff.csv"), sim);
  write_embeddings_jsonl(join(out_dir, "embeddings.jsonl"), sim);
  write_truth_jsonl(join(out_dir, "truth.jsonl"), sim.dataset);
  write_annotations_json(join(out_dir, "annotations.json"), sim.annotations);
  CT_INFO("simulate: wrote %d events, %d samples to %s", sim.dataset.num_events(),
          sim.dataset.num_samples(), out_dir.c_str());
}

RunOutcome cmd_run(const RunConfig& cfg, const std::string& data_dir,
                   RunMode mode, const std::string& out_dir) {
  ensure_dir(out_dir);
  const Dataset ds = ingest_dir(data_dir, cfg.hyper);
  for (const std::string& violation : validate_dataset(ds))
    CT_WARN("ingested dataset: %s", violation.c_str());

  RunOutcome outcome;
  outcome.result = run(ds, cfg.hyper, mode, cfg.train);

  write_labels_jsonl(join(out_dir, "labels.jsonl"), ds, outcome.result);
  write_attendance_csv(join(out_dir, "attendance.csv"), ds,
                       outcome.result.attendance);
  write_checkpoint_json(join(out_dir, "checkpoint.json"), outcome.result.adapter,
                        cfg.hyper);
  write_history_json(join(out_dir, "history.json"), outcome.result, cfg.hyper);

  // When the ingested data carries truth (simulated sets do), score in place
  // so sweeps do not have to re-read files.
  bool have_truth = !ds.samples.empty();
  std::vector<int> truth;
  truth.reserve(ds.samples.size());
  for (const FaceSample& s : ds.samples) {
    if (!s.truth) {
      have_truth = false;
      break;
    }
    truth.push_back(*s.truth);
  }
  if (have_truth) {
    outcome.have_truth = true;
    outcome.metrics_vs_truth = labeling_metrics(outcome.result.hard, truth);
  }
  CT_INFO("run: mode %s finished after %zu iterations (%s)", run_mode_name(mode),
          outcome.result.history.size(),
          exit_reason_name(outcome.result.exit_reason));
  return outcome;
}

LabelingMetrics cmd_eval(const std::string& run_dir, const std::string& truth_path,
                         const std::string& out_dir) {
  ensure_dir(out_dir);
  const std::vector<LabelRow> labels = read_labels_jsonl(join(run_dir, "labels.jsonl"));
  const std::map<std::int64_t, int> truth = read_truth_jsonl(truth_path);

  std::vector<std::optional<int>> pred;
  std::vector<int> truth_vec;
  pred.reserve(labels.size());
  truth_vec.reserve(labels.size());
  int m = 0;
  for (const LabelRow& row : labels) {
    const auto it = truth.find(row.sample_id);
    if (it == truth.end())
      throw std::runtime_error("truth file " + truth_path + " is missing sample_id " +
                               std::to_string(row.sample_id));
    pred.push_back(row.hard);
    truth_vec.push_back(it->second);
    m = std::max(m, static_cast<int>(row.soft.size()));
  }
  if (labels.size() != truth.size())
    throw std::runtime_error("labels and truth disagree on the sample set (" +
                             std::to_string(labels.size()) + " vs " +
                             std::to_string(truth.size()) + " rows)");

  const LabelingMetrics metrics = labeling_metrics(pred, truth_vec);
  write_labeling_metrics_csv(join(out_dir, "labeling_metrics.csv"), metrics);
  write_confusion_csv(join(out_dir, "confusion.csv"),
                      confusion_matrix(pred, truth_vec, m));

  // CMC over POI-truth samples. Ranked by the run's soft-label scores, or by
  // an external classifier's scores.csv when one sits in the run directory.
  std::map<std::int64_t, Vec> external;
  const std::string scores_path = join(run_dir, "scores.csv");
  if (fs::exists(scores_path)) {
    for (ScoreRow& row : read_scores_csv(scores_path))
      external[row.sample_id] = std::move(row.scores);
    CT_INFO("eval: ranking CMC by external scores from %s", scores_path.c_str());
  }
  std::vector<int> poi_rows;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (truth_vec[i] != kNonPoi) poi_rows.push_back(static_cast<int>(i));
  if (!poi_rows.empty() && m > 0) {
    Mat scores(static_cast<Eigen::Index>(poi_rows.size()), m);
    std::vector<int> poi_truth;
    poi_truth.reserve(poi_rows.size());
    for (std::size_t r = 0; r < poi_rows.size(); ++r) {
      const LabelRow& row = labels[static_cast<std::size_t>(poi_rows[r])];
      if (!external.empty()) {
        const auto it = external.find(row.sample_id);
        if (it == external.end())
          throw std::runtime_error(scores_path + " is missing sample_id " +
                                   std::to_string(row.sample_id));
        if (it->second.size() != m)
          throw std::runtime_error(scores_path + ": score width does not match labels");
        scores.row(static_cast<Eigen::Index>(r)) = it->second.transpose();
      } else {
        scores.row(static_cast<Eigen::Index>(r)) = row.soft.transpose();
      }
      poi_truth.push_back(truth_vec[static_cast<std::size_t>(poi_rows[r])]);
    }
    write_cmc_csv(join(out_dir, "cmc.csv"), cmc_curve(scores, poi_truth, m));
  }

  const fs::path annotations_path = fs::path(truth_path).parent_path() / "annotations.json";
  if (fs::exists(annotations_path)) {
    const NoiseAnnotations ann = read_annotations_json(annotations_path.string());
    write_noise_report_csv(join(out_dir, "noise_report.csv"), noise_report(ann));
  } else {
    CT_INFO("eval: no annotations.json next to %s, skipping noise report",
            truth_path.c_str());
  }
  return metrics;
}

std::optional<SweepAxis> sweep_axis_from_name(const std::string& name) {
  if (name == "faces") return SweepAxis::kFaces;
  if (name == "devices") return SweepAxis::kDevices;
  if (name == "nonpoi") return SweepAxis::kNonPoi;
  return std::nullopt;
}

const char* sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kFaces: return "faces";
    case SweepAxis::kDevices: return "devices";
    case SweepAxis::kNonPoi: return "nonpoi";
  }
  return "devices";
}

void cmd_sweep(const RunConfig& cfg, const SweepOptions& opts,
               const std::string& out_dir) {
  if (opts.values.empty())
    throw std::invalid_argument("sweep: no axis values given");
  if (opts.repeats < 1)
    throw std::invalid_argument("sweep: repeats must be >= 1");
  for (double v : opts.values) {
    if (opts.axis == SweepAxis::kNonPoi) {
      if (v < 0.0 || v != std::floor(v))
        throw std::invalid_argument("sweep: nonpoi values must be non-negative integers");
    } else if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("sweep: rate values must be in [0,1]");
    }
  }
  ensure_dir(out_dir);

  struct Cell {
    std::size_t value_idx;
    int repeat;
  };
  std::vector<Cell> cells;
  for (std::size_t vi = 0; vi < opts.values.size(); ++vi)
    for (int rep = 0; rep < opts.repeats; ++rep)
      cells.push_back(Cell{vi, rep});

  // Cells are independent; a bounded pool works through them while every
  // cell stays deterministic through its derived seed.
  std::vector<double> f1(cells.size(), 0.0);
  std::vector<double> iters(cells.size(), 0.0);

  auto execute = [&](std::size_t idx) {
    Cell& cell = cells[idx];
    RunConfig local = cfg;
    const double value = opts.values[cell.value_idx];
    switch (opts.axis) {
      case SweepAxis::kFaces: local.sim.false_alarm_face_rate = value; break;
      case SweepAxis::kDevices: local.sim.false_alarm_device_rate = value; break;
      case SweepAxis::kNonPoi: local.sim.n_nonpoi = static_cast<int>(value); break;
    }
    const std::uint64_t cell_seed = Rng::derive(
        cfg.sim.seed, (static_cast<std::uint64_t>(cell.value_idx) << 20) +
                          static_cast<std::uint64_t>(cell.repeat));
    local.sim.seed = cell_seed;
    local.hyper.seed = cell_seed;
    local.train.seed = cell_seed;

    char name[64];
    std::snprintf(name, sizeof(name), "%s_%g_rep%d", sweep_axis_name(opts.axis),
                  value, cell.repeat);
    const std::string cell_dir = join(out_dir, name);
    const std::string data_dir = join(cell_dir, "data");
    const std::string run_dir = join(cell_dir, "run");
    const std::string eval_dir = join(cell_dir, "eval");

    cmd_simulate(local, data_dir);
    const RunOutcome outcome = cmd_run(local, data_dir, RunMode::kAutotune, run_dir);
    const LabelingMetrics metrics =
        cmd_eval(run_dir, join(data_dir, "truth.jsonl"), eval_dir);
    f1[idx] = metrics.f1;
    iters[idx] = static_cast<double>(outcome.result.history.size());
  };

  if (opts.jobs <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) execute(i);
  } else {
    std::mutex next_mutex;
    std::size_t next = 0;
    auto worker = [&]() {
      while (true) {
        std::size_t idx;
        {
          std::lock_guard<std::mutex> lock(next_mutex);
          if (next >= cells.size()) return;
          idx = next++;
        }
        execute(idx);
      }
    };
    std::vector<std::thread> pool;
    const int workers = std::min<int>(opts.jobs, static_cast<int>(cells.size()));
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  std::vector<SweepRow> rows;
  for (std::size_t vi = 0; vi < opts.values.size(); ++vi) {
    SweepRow row;
    row.value = opts.values[vi];
    double sum = 0.0, sum_sq = 0.0, iter_sum = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].value_idx != vi) continue;
      sum += f1[i];
      sum_sq += f1[i] * f1[i];
      iter_sum += iters[i];
      ++count;
    }
    row.mean_f1 = sum / count;
    const double var = std::max(0.0, sum_sq / count - row.mean_f1 * row.mean_f1);
    row.std_f1 = std::sqrt(var);
    row.mean_iterations = iter_sum / count;
    rows.push_back(row);
  }
  write_sweep_csv(join(out_dir, "sweep.csv"), rows);
}

}  // namespace crosstune
