// Acceptance suite: runs every release gate at its stated tolerance and
// prints one pass/fail line per criterion. Exit status is the number of
// failed criteria.
//
//   acceptance          run everything
//   acceptance 5 7      run criteria 5 and 7 only

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "crosstune/association.hpp"
#include "crosstune/clustering.hpp"
#include "crosstune/commands.hpp"
#include "crosstune/ingestion.hpp"
#include "crosstune/io.hpp"
#include "crosstune/metrics.hpp"
#include "crosstune/model_update.hpp"
#include "crosstune/pipeline.hpp"
#include "crosstune/rng.hpp"
#include "crosstune/simulation.hpp"
#include "support/oracles.hpp"

using namespace crosstune;

namespace {

namespace fs = std::filesystem;

struct CriterionResult {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << std::fixed << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// shared experiment helpers

struct PipelineStats {
  double f1 = 0.0;
  int iterations = 0;
  bool converged = false;
  double seconds = 0.0;
};

std::vector<int> truth_of(const Dataset& ds) {
  std::vector<int> truth;
  truth.reserve(ds.samples.size());
  for (const FaceSample& s : ds.samples) truth.push_back(s.truth.value_or(kNonPoi));
  return truth;
}

PipelineStats run_pipeline(const SimConfig& sim_cfg, const HyperParams& hyper,
                           RunMode mode) {
  TrainConfig train;
  train.seed = hyper.seed;
  train.lambda_stoc = hyper.lambda_stoc;

  const auto start = std::chrono::steady_clock::now();
  const SimOutput sim = simulate(sim_cfg);
  const RunResult result = run(sim.dataset, hyper, mode, train);
  PipelineStats stats;
  stats.seconds = seconds_since(start);
  stats.iterations = static_cast<int>(result.history.size());
  stats.converged = result.exit_reason == ExitReason::kConverged;
  stats.f1 = labeling_metrics(result.hard, truth_of(sim.dataset)).f1;
  return stats;
}

SimConfig clean_sim(std::uint64_t seed) {
  SimConfig cfg;  // defaults: 30 POI, 100 events, spread 0.1
  cfg.n_nonpoi = 0;
  cfg.seed = seed;
  return cfg;
}

HyperParams default_hyper(std::uint64_t seed) {
  HyperParams hyper;
  hyper.seed = seed;
  return hyper;
}

struct SweepCell {
  double value = 0.0;
  double mean_f1 = 0.0;
  double mean_iterations = 0.0;
};

std::vector<SweepCell> run_sweep(
    const std::vector<double>& values, int seeds,
    const std::function<SimConfig(double, std::uint64_t)>& make_sim) {
  std::vector<SweepCell> cells;
  for (double value : values) {
    SweepCell cell;
    cell.value = value;
    for (int s = 1; s <= seeds; ++s) {
      const PipelineStats stats = run_pipeline(
          make_sim(value, static_cast<std::uint64_t>(s)),
          default_hyper(static_cast<std::uint64_t>(s)), RunMode::kAutotune);
      cell.mean_f1 += stats.f1;
      cell.mean_iterations += stats.iterations;
    }
    cell.mean_f1 /= seeds;
    cell.mean_iterations /= seeds;
    cells.push_back(cell);
  }
  return cells;
}

std::string sweep_summary(const std::vector<SweepCell>& cells) {
  std::ostringstream os;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) os << ", ";
    os << cells[i].value << ": F1 " << fmt(cells[i].mean_f1, 3) << "/"
       << fmt(cells[i].mean_iterations, 1) << " it";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// criteria

CriterionResult assignment_oracle() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int g = 1 + static_cast<int>(rng.uniform_int(std::uint64_t{7}));
    const int m = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(g)));
    Mat cost(g, m);
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < m; ++j)
        cost(i, j) = static_cast<double>(rng.uniform_int(std::uint64_t{21}));
    const Assignment a = hungarian_assign(cost);
    const double expected = test_oracles::brute_force_min_cost(cost);
    if (a.total_cost != expected) {
      return {false, "instance " + std::to_string(trial) + ": got " +
                         std::to_string(a.total_cost) + ", oracle " +
                         std::to_string(expected)};
    }
    ++checked;
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 5.0)
    return {false, "200 instances exact but runtime " + fmt(elapsed, 2) + "s >= 5s"};
  return {true, std::to_string(checked) + "/200 exact in " + fmt(elapsed, 2) + "s"};
}

CriterionResult gradient_correctness() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(2025);
  const double step = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4 + static_cast<int>(rng.uniform_int(std::uint64_t{13}));
    const int d = 2 + static_cast<int>(rng.uniform_int(std::uint64_t{7}));
    const int m = 2 + static_cast<int>(rng.uniform_int(std::uint64_t{3}));

    Mat raw(n, d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) raw(i, j) = rng.gaussian();
      raw.row(i) /= raw.row(i).norm();
    }
    std::vector<SoftLabel> soft;
    for (int i = 0; i < n; ++i) {
      SoftLabel s;
      s.probs.resize(m);
      double sum = 0.0;
      for (int k = 0; k < m; ++k) {
        s.probs[k] = rng.uniform();
        sum += s.probs[k];
      }
      s.probs /= sum;
      s.vote_count = 4;
      soft.push_back(std::move(s));
    }
    AdapterModel model = AdapterModel::init(d, m, rng.next_u64());
    for (Eigen::Index r = 0; r < model.A.rows(); ++r)
      for (Eigen::Index c = 0; c < model.A.cols(); ++c)
        model.A(r, c) += 0.2 * rng.gaussian();
    const double lambda = trial % 4 == 0 ? 0.0 : rng.uniform(0.0, 0.2);

    const Gradients grads = gradients(raw, soft, model, lambda);
    auto fd = [&](double* param) {
      const double save = *param;
      *param = save + step;
      const double up = loss(raw, soft, model, lambda).total;
      *param = save - step;
      const double down = loss(raw, soft, model, lambda).total;
      *param = save;
      return (up - down) / (2.0 * step);
    };
    auto track = [&](double numeric, double analytic) {
      const double rel =
          std::abs(numeric - analytic) /
          std::max(1.0, std::max(std::abs(numeric), std::abs(analytic)));
      worst = std::max(worst, rel);
    };
    for (Eigen::Index r = 0; r < model.A.rows(); ++r)
      for (Eigen::Index c = 0; c < model.A.cols(); ++c)
        track(fd(&model.A(r, c)), grads.A(r, c));
    for (Eigen::Index r = 0; r < model.W.rows(); ++r)
      for (Eigen::Index c = 0; c < model.W.cols(); ++c)
        track(fd(&model.W(r, c)), grads.W(r, c));
    for (Eigen::Index k = 0; k < model.b.size(); ++k)
      track(fd(&model.b[k]), grads.b[k]);
  }
  const double elapsed = seconds_since(start);
  if (worst >= 1e-4)
    return {false, "worst relative error " + fmt(worst * 1e6, 3) + "e-6 >= 1e-4"};
  if (elapsed >= 10.0)
    return {false, "gradients fine but runtime " + fmt(elapsed, 2) + "s >= 10s"};
  return {true, "20 instances, worst relative error " + fmt(worst * 1e6, 3) +
                    "e-6 in " + fmt(elapsed, 2) + "s"};
}

CriterionResult clustering_oracle() {
  Rng rng(2026);
  // part 1: beta = 0 against the naive reference, exact partitions
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(std::uint64_t{49}));
    const int g = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    const int d = 3 + static_cast<int>(rng.uniform_int(std::uint64_t{6}));

    Dataset ds;
    ds.identities = {Identity{0, "a", "02:00:00:00:00:00"},
                     Identity{1, "b", "02:00:00:00:00:01"}};
    Event e;
    e.event_id = 0;
    e.attendance = Vec::Ones(2);
    ds.events.push_back(e);
    ds.dim = d;
    ds.features.resize(n, d);
    std::vector<AttendanceVector> att = {Vec::Ones(2)};
    for (int i = 0; i < n; ++i) {
      FaceSample s;
      s.sample_id = i;
      s.event_id = 0;
      ds.samples.push_back(s);
      ds.events[0].sample_rows.push_back(i);
      for (int j = 0; j < d; ++j) ds.features(i, j) = rng.gaussian();
      ds.features.row(i) /= ds.features.row(i).norm();
    }
    const Mat sim = similarity_matrix(ds, ds.features, att, 0.0);
    const auto expected = test_oracles::naive_average_linkage(sim, g);
    auto groups = agglomerative_cluster(sim, g).groups();
    for (auto& grp : groups) std::sort(grp.begin(), grp.end());
    std::sort(groups.begin(), groups.end());
    if (groups != expected)
      return {false, "partition mismatch at n=" + std::to_string(n) +
                         ", g=" + std::to_string(g)};
  }

  // part 2: separable blobs with g = true class count, n <= 8
  for (int trial = 0; trial < 20; ++trial) {
    const int classes = 2 + static_cast<int>(rng.uniform_int(std::uint64_t{2}));
    const int n =
        classes + 1 +
        static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(8 - classes)));
    const int d = 3 * classes;
    Mat features(n, d);
    std::vector<int> labels;
    for (int i = 0; i < n; ++i) {
      const int c = i < classes ? i
                                : static_cast<int>(rng.uniform_int(
                                      static_cast<std::uint64_t>(classes)));
      labels.push_back(c);
      Vec v = Vec::Zero(d);
      v[3 * c] = 1.0;
      for (int j = 0; j < d; ++j) v[j] += 0.04 * rng.gaussian();
      features.row(i) = (v / v.norm()).transpose();
    }
    Mat sim(n, n);
    for (int i = 0; i < n; ++i) {
      sim(i, i) = 0.0;
      for (int j = i + 1; j < n; ++j) {
        const double v = -(features.row(i) - features.row(j)).squaredNorm();
        sim(i, j) = v;
        sim(j, i) = v;
      }
    }
    const ClusterSet cs = agglomerative_cluster(sim, classes);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const bool same_truth = labels[static_cast<std::size_t>(i)] ==
                                labels[static_cast<std::size_t>(j)];
        const bool same_cluster = cs.membership[static_cast<std::size_t>(i)] ==
                                  cs.membership[static_cast<std::size_t>(j)];
        if (same_truth != same_cluster)
          return {false, "blob recovery failed at trial " + std::to_string(trial)};
      }
  }
  return {true, "50 reference matches, 20 blob recoveries"};
}

CriterionResult reduction_identities() {
  Rng rng(2027);
  // one-hot soft labels: centers are class means, loss is the classic center loss
  const int n = 14, d = 6, m = 3;
  Mat raw(n, d);
  std::vector<int> classes;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) raw(i, j) = rng.gaussian();
    raw.row(i) /= raw.row(i).norm();
    classes.push_back(i % m);
  }
  std::vector<SoftLabel> soft;
  for (int c : classes) {
    SoftLabel s;
    s.probs = Vec::Zero(m);
    s.probs[c] = 1.0;
    s.vote_count = 4;
    soft.push_back(std::move(s));
  }
  AdapterModel model = AdapterModel::init(d, m, 4);
  const Mat adapted = transform(raw, model);

  const auto centers = stochastic_centers(adapted, soft);
  double worst_center = 0.0;
  double classic = 0.0;
  for (int k = 0; k < m; ++k) {
    Vec mean = Vec::Zero(d);
    int count = 0;
    for (int i = 0; i < n; ++i)
      if (classes[static_cast<std::size_t>(i)] == k) {
        mean += adapted.row(i).transpose();
        ++count;
      }
    mean /= count;
    worst_center = std::max(
        worst_center,
        (*centers[static_cast<std::size_t>(k)] - mean).cwiseAbs().maxCoeff());
  }
  for (int i = 0; i < n; ++i)
    classic +=
        (adapted.row(i).transpose() -
         *centers[static_cast<std::size_t>(classes[static_cast<std::size_t>(i)])])
            .squaredNorm();
  const LossParts parts = loss(raw, soft, model, 1.0);
  const double loss_gap = std::abs(parts.stoc_center - classic);
  if (worst_center > 1e-10 || loss_gap > 1e-10)
    return {false, "center gap " + std::to_string(worst_center) + ", loss gap " +
                       std::to_string(loss_gap)};

  // intra-event similarity carries no attendance term at all
  Dataset ds;
  ds.identities = {Identity{0, "a", "02:00:00:00:00:00"},
                   Identity{1, "b", "02:00:00:00:00:01"}};
  Event e;
  e.event_id = 0;
  e.attendance = Vec::Ones(2) * 0.7;
  ds.dim = d;
  ds.features.resize(4, d);
  for (int i = 0; i < 4; ++i) {
    FaceSample s;
    s.sample_id = i;
    s.event_id = 0;
    ds.samples.push_back(s);
    e.sample_rows.push_back(i);
    ds.features.row(i) = raw.row(i);
  }
  ds.events.push_back(e);
  const std::vector<AttendanceVector> att = {e.attendance};
  const Mat with_beta = similarity_matrix(ds, ds.features, att, 1e6);
  const Mat without_beta = similarity_matrix(ds, ds.features, att, 0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (with_beta(i, j) != without_beta(i, j))
        return {false, "attendance term leaked into an intra-event pair"};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == j) continue;
      const Vec zi = ds.features.row(i).transpose();
      const Vec zj = ds.features.row(j).transpose();
      const double scalar = joint_log_similarity(zi, zj, e.attendance, e.attendance, 123.0);
      const double direct = -(zi - zj).squaredNorm();
      if (scalar != direct) return {false, "scalar intra-event similarity != -D"};
    }
  return {true, "one-hot reduction <= 1e-10, intra-event similarity = -D exactly"};
}

CriterionResult clean_end_to_end(std::vector<bool>* converged_out,
                                 std::vector<double>* f1_out) {
  std::ostringstream detail;
  double worst_f1 = 1.0, worst_seconds = 0.0;
  int worst_iterations = 0;
  for (int seed = 1; seed <= 10; ++seed) {
    const PipelineStats stats =
        run_pipeline(clean_sim(static_cast<std::uint64_t>(seed)),
                     default_hyper(static_cast<std::uint64_t>(seed)),
                     RunMode::kAutotune);
    if (converged_out) converged_out->push_back(stats.converged);
    if (f1_out) f1_out->push_back(stats.f1);
    worst_f1 = std::min(worst_f1, stats.f1);
    worst_seconds = std::max(worst_seconds, stats.seconds);
    worst_iterations = std::max(worst_iterations, stats.iterations);
    if (stats.f1 < 0.95)
      return {false,
              "seed " + std::to_string(seed) + ": F1 " + fmt(stats.f1) + " < 0.95"};
    if (!stats.converged || stats.iterations > 5)
      return {false, "seed " + std::to_string(seed) + ": " +
                         std::to_string(stats.iterations) +
                         " iterations without convergence within 5"};
    if (stats.seconds >= 60.0)
      return {false, "seed " + std::to_string(seed) + ": " + fmt(stats.seconds, 1) +
                         "s >= 60s"};
  }
  detail << "10 seeds: min F1 " << fmt(worst_f1) << ", max iterations "
         << worst_iterations << ", max " << fmt(worst_seconds, 1) << "s";
  return {true, detail.str()};
}

CriterionResult device_noise_trend() {
  const std::vector<double> rates = {0.0, 0.1, 0.3, 0.5};
  const auto cells = run_sweep(rates, 5, [](double rate, std::uint64_t seed) {
    SimConfig cfg = clean_sim(seed);
    cfg.false_alarm_device_rate = rate;
    return cfg;
  });
  for (std::size_t i = 1; i < cells.size(); ++i) {
    if (cells[i].mean_f1 > cells[i - 1].mean_f1 + 0.02)
      return {false, "F1 rose by " + fmt(cells[i].mean_f1 - cells[i - 1].mean_f1) +
                         " from rate " + std::to_string(cells[i - 1].value) + " to " +
                         std::to_string(cells[i].value)};
  }
  if (cells.back().mean_f1 < 0.74)
    return {false, "mean F1 at rate 0.5 is " + fmt(cells.back().mean_f1) + " < 0.74"};
  for (const SweepCell& cell : cells) {
    if (cell.mean_iterations > 7.0)
      return {false, "rate " + std::to_string(cell.value) + " took " +
                         fmt(cell.mean_iterations, 1) + " iterations on average"};
  }
  return {true, sweep_summary(cells)};
}

CriterionResult face_noise_trend() {
  const std::vector<double> rates = {0.0, 0.1, 0.3, 0.5};
  const auto cells = run_sweep(rates, 5, [](double rate, std::uint64_t seed) {
    SimConfig cfg = clean_sim(seed);
    cfg.false_alarm_face_rate = rate;
    return cfg;
  });
  for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
    if (cells[i].mean_f1 < 0.73)
      return {false, "mean F1 at rate " + std::to_string(cells[i].value) + " is " +
                         fmt(cells[i].mean_f1) + " < 0.73"};
  }
  const double last_step = cells[2].mean_f1 - cells[3].mean_f1;
  for (std::size_t i = 1; i + 1 < cells.size(); ++i) {
    const double step = cells[i - 1].mean_f1 - cells[i].mean_f1;
    if (step >= last_step)
      return {false, "drop at 0.5 (" + fmt(last_step) +
                         ") is not the largest single step (" + fmt(step) + " at " +
                         std::to_string(cells[i].value) + "): " + sweep_summary(cells)};
  }
  return {true, sweep_summary(cells) + "; cliff " + fmt(last_step, 3)};
}

CriterionResult nonpoi_trend() {
  double mean_f1 = 0.0, mean_iterations = 0.0;
  const int seeds = 5;
  for (int seed = 1; seed <= seeds; ++seed) {
    SimConfig cfg = clean_sim(static_cast<std::uint64_t>(seed));
    cfg.n_nonpoi = 4;  // presence probability stays at the 0.1 default
    const PipelineStats stats = run_pipeline(
        cfg, default_hyper(static_cast<std::uint64_t>(seed)), RunMode::kAutotune);
    mean_f1 += stats.f1;
    mean_iterations += stats.iterations;
  }
  mean_f1 /= seeds;
  mean_iterations /= seeds;
  if (mean_f1 < 0.77) return {false, "mean F1 " + fmt(mean_f1) + " < 0.77"};
  if (mean_iterations > 5.0)
    return {false, "mean iterations " + fmt(mean_iterations, 1) + " > 5"};
  return {true,
          "mean F1 " + fmt(mean_f1) + ", mean iterations " + fmt(mean_iterations, 1)};
}

CriterionResult soft_beats_hard() {
  double mean_soft = 0.0, mean_hard = 0.0;
  const int seeds = 10;
  for (int seed = 1; seed <= seeds; ++seed) {
    SimConfig cfg = clean_sim(static_cast<std::uint64_t>(seed));
    cfg.false_alarm_device_rate = 0.3;
    mean_soft += run_pipeline(cfg, default_hyper(static_cast<std::uint64_t>(seed)),
                              RunMode::kAutotune)
                     .f1;
    mean_hard += run_pipeline(cfg, default_hyper(static_cast<std::uint64_t>(seed)),
                              RunMode::kDeterministic)
                     .f1;
  }
  mean_soft /= seeds;
  mean_hard /= seeds;
  if (mean_soft < mean_hard)
    return {false,
            "autotune " + fmt(mean_soft) + " < deterministic " + fmt(mean_hard)};
  return {true, "autotune " + fmt(mean_soft) + " >= deterministic " +
                    fmt(mean_hard) + " over 10 paired seeds"};
}

CriterionResult update_rate_behavior(const std::vector<bool>& gamma005_converged,
                                     const std::vector<double>& gamma005_f1) {
  for (std::size_t i = 0; i < gamma005_converged.size(); ++i)
    if (!gamma005_converged[i])
      return {false, "gamma 0.05 failed to converge on seed " + std::to_string(i + 1)};

  double mean_slow = 0.0;
  for (double f1 : gamma005_f1) mean_slow += f1;
  mean_slow /= static_cast<double>(gamma005_f1.size());

  double mean_fast = 0.0;
  for (int seed = 1; seed <= 10; ++seed) {
    HyperParams hyper = default_hyper(static_cast<std::uint64_t>(seed));
    hyper.gamma = 0.2;
    mean_fast += run_pipeline(clean_sim(static_cast<std::uint64_t>(seed)), hyper,
                              RunMode::kAutotune)
                     .f1;
  }
  mean_fast /= 10.0;
  if (mean_fast > mean_slow + 1e-12)
    return {false, "gamma 0.2 mean F1 " + fmt(mean_fast) + " beat gamma 0.05 " +
                       fmt(mean_slow)};
  return {true, "gamma 0.05 converged on 10/10 seeds; F1 " + fmt(mean_slow) +
                    " (0.05) vs " + fmt(mean_fast) + " (0.2)"};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

CriterionResult determinism_and_round_trip() {
  const fs::path base = fs::temp_directory_path() / "crosstune_acceptance";
  fs::remove_all(base);
  fs::create_directories(base);

  RunConfig cfg;
  cfg.sim.n_nonpoi = 3;
  cfg.sim.false_alarm_face_rate = 0.2;
  cfg.sim.false_alarm_device_rate = 0.2;
  cfg.sim.events = 40;
  cfg.sim.m_poi = 10;
  cfg.sim.seed = 7;
  cfg.hyper.seed = 7;
  cfg.hyper.max_iterations = 3;
  cfg.train.seed = 7;
  cfg.train.epochs = 10;

  const std::string data1 = (base / "data1").string();
  const std::string data2 = (base / "data2").string();
  cmd_simulate(cfg, data1);
  cmd_simulate(cfg, data2);
  for (const char* name : {"sniff.csv", "embeddings.jsonl", "identities.csv",
                           "truth.jsonl", "annotations.json"}) {
    if (slurp(data1 + "/" + name) != slurp(data2 + "/" + name))
      return {false, std::string(name) + " differs between identical simulate runs"};
  }

  const std::string run1 = (base / "run1").string();
  const std::string run2 = (base / "run2").string();
  cmd_run(cfg, data1, RunMode::kAutotune, run1);
  cmd_run(cfg, data1, RunMode::kAutotune, run2);
  for (const char* name :
       {"labels.jsonl", "attendance.csv", "checkpoint.json", "history.json"}) {
    if (slurp(run1 + "/" + name) != slurp(run2 + "/" + name))
      return {false, std::string(name) + " differs between identical runs"};
  }

  const std::string eval1 = (base / "eval1").string();
  const std::string eval2 = (base / "eval2").string();
  cmd_eval(run1, data1 + "/truth.jsonl", eval1);
  cmd_eval(run2, data2 + "/truth.jsonl", eval2);
  for (const char* name : {"labeling_metrics.csv", "confusion.csv", "cmc.csv",
                           "noise_report.csv"}) {
    if (slurp(eval1 + "/" + name) != slurp(eval2 + "/" + name))
      return {false, std::string(name) + " differs between identical evals"};
  }

  // simulate -> ingest reproduces the in-memory dataset exactly
  const SimOutput sim = simulate(cfg.sim);
  const auto identities = parse_identities(data1 + "/identities.csv");
  const auto sniffs = filter_by_rss(parse_sniff_log(data1 + "/sniff.csv"),
                                    cfg.hyper.rss_threshold_dbm);
  const auto embeddings = parse_embeddings(data1 + "/embeddings.jsonl");
  const Dataset ds =
      segment_events(embeddings, sniffs, identities, cfg.hyper.slot_hours);

  if (ds.num_events() != sim.dataset.num_events() ||
      ds.num_samples() != sim.dataset.num_samples() ||
      ds.num_identities() != sim.dataset.num_identities())
    return {false, "round-trip changed dataset shape"};
  if ((ds.features - sim.dataset.features).cwiseAbs().maxCoeff() != 0.0)
    return {false, "round-trip perturbed feature values"};
  for (int k = 0; k < ds.num_events(); ++k) {
    const Event& a = ds.events[static_cast<std::size_t>(k)];
    const Event& b = sim.dataset.events[static_cast<std::size_t>(k)];
    if (a.day != b.day || a.slot_index != b.slot_index ||
        a.location != b.location || a.sample_rows != b.sample_rows ||
        (a.attendance - b.attendance).cwiseAbs().maxCoeff() != 0.0)
      return {false, "round-trip changed event " + std::to_string(k)};
  }
  for (int i = 0; i < ds.num_samples(); ++i) {
    const FaceSample& a = ds.samples[static_cast<std::size_t>(i)];
    const FaceSample& b = sim.dataset.samples[static_cast<std::size_t>(i)];
    if (a.sample_id != b.sample_id || a.event_id != b.event_id || a.truth != b.truth)
      return {false, "round-trip changed sample " + std::to_string(i)};
  }

  fs::remove_all(base);
  return {true, "byte-identical outputs; exact ingest round-trip"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  auto wanted = [&](int id) { return only.empty() || only.count(id) > 0; };

  // criterion 5 feeds criterion 10
  std::vector<bool> c5_converged;
  std::vector<double> c5_f1;

  struct Entry {
    int id;
    const char* title;
    std::function<CriterionResult()> fn;
  };
  const std::vector<Entry> criteria = {
      {1, "assignment oracle", assignment_oracle},
      {2, "gradient correctness", gradient_correctness},
      {3, "clustering oracle", clustering_oracle},
      {4, "reduction identities", reduction_identities},
      {5, "clean-data end-to-end",
       [&] { return clean_end_to_end(&c5_converged, &c5_f1); }},
      {6, "noise trend: false-alarm devices", device_noise_trend},
      {7, "noise trend: false-alarm faces", face_noise_trend},
      {8, "non-POI trend", nonpoi_trend},
      {9, "soft labels beat hard labels", soft_beats_hard},
      {10, "update-rate behavior",
       [&] {
         if (c5_converged.empty()) clean_end_to_end(&c5_converged, &c5_f1);
         return update_rate_behavior(c5_converged, c5_f1);
       }},
      {11, "determinism and round-trip", determinism_and_round_trip},
  };

  int failures = 0;
  for (const Entry& entry : criteria) {
    if (!wanted(entry.id)) continue;
    CriterionResult result;
    try {
      result = entry.fn();
    } catch (const std::exception& e) {
      result = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] C%02d %s: %s\n", result.pass ? "PASS" : "FAIL", entry.id,
                entry.title, result.detail.c_str());
    std::fflush(stdout);
    if (!result.pass) ++failures;
  }
  return failures;
}
