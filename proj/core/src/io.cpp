#include "crosstune/io.hpp"

#include <charconv>
#include <fstream>

#include <nlohmann/json.hpp>

#include "crosstune/ingestion.hpp"

namespace crosstune {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::int64_t slot_start_seconds(const Event& e, int slot_hours) {
  return e.day * 86400 + static_cast<std::int64_t>(e.slot_index) * slot_hours * 3600;
}

json vec_to_json(const Vec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat mat_from_json(const json& rows) {
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c = r > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Mat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
  return m;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

void write_sniff_csv(const std::string& path, const SimOutput& sim) {
  std::ofstream out = open_out(path);
  out << "timestamp,mac,rss_dbm,location\n";
  const Dataset& ds = sim.dataset;
  for (const Event& e : ds.events) {
    const std::int64_t base = slot_start_seconds(e, sim.slot_hours);
    for (Eigen::Index j = 0; j < e.attendance.size(); ++j) {
      if (e.attendance[j] <= 0.0) continue;
      const std::int64_t ts = base + 30 + j;
      const double rss = -35.0 - static_cast<double>((e.event_id + j) % 15);
      out << ts << ',' << ds.identities[static_cast<std::size_t>(j)].mac << ','
          << format_double(rss) << ',' << e.location << '\n';
    }
  }
}

void write_embeddings_jsonl(const std::string& path, const SimOutput& sim) {
  std::ofstream out = open_out(path);
  const Dataset& ds = sim.dataset;
  for (const Event& e : ds.events) {
    const std::int64_t base = slot_start_seconds(e, sim.slot_hours);
    int offset = 0;
    for (int r : e.sample_rows) {
      const FaceSample& s = ds.samples[static_cast<std::size_t>(r)];
      ordered_json obj;
      obj["sample_id"] = s.sample_id;
      obj["timestamp"] = base + 120 + offset++;
      obj["location"] = e.location;
      obj["feature"] = vec_to_json(ds.features.row(r).transpose());
      if (s.truth) {
        obj["truth"] = *s.truth == kNonPoi
                           ? std::string(kNonPoiTruth)
                           : ds.identities[static_cast<std::size_t>(*s.truth)].name;
      } else {
        obj["truth"] = nullptr;
      }
      out << obj.dump() << '\n';
    }
  }
}

void write_identities_csv(const std::string& path,
                          const std::vector<Identity>& identities) {
  std::ofstream out = open_out(path);
  out << "index,name,mac\n";
  for (const Identity& id : identities)
    out << id.index << ',' << id.name << ',' << id.mac << '\n';
}

void write_truth_jsonl(const std::string& path, const Dataset& ds) {
  std::ofstream out = open_out(path);
  for (const FaceSample& s : ds.samples) {
    ordered_json obj;
    obj["sample_id"] = s.sample_id;
    obj["truth"] = s.truth ? *s.truth : kNonPoi;
    out << obj.dump() << '\n';
  }
}

void write_annotations_json(const std::string& path, const NoiseAnnotations& ann) {
  ordered_json events = ordered_json::array();
  for (std::size_t k = 0; k < ann.nonpoi_samples.size(); ++k) {
    ordered_json e;
    e["event_id"] = k;
    e["false_alarm_faces"] = ann.false_alarm_faces[k];
    e["false_alarm_devices"] = ann.false_alarm_devices[k];
    e["nonpoi_samples"] = ann.nonpoi_samples[k];
    events.push_back(std::move(e));
  }
  ordered_json root;
  root["events"] = std::move(events);
  std::ofstream out = open_out(path);
  out << root.dump(2) << '\n';
}

NoiseAnnotations read_annotations_json(const std::string& path) {
  std::ifstream in = open_in(path);
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  const auto& events = root.at("events");
  NoiseAnnotations ann = NoiseAnnotations::empty(static_cast<int>(events.size()));
  for (std::size_t k = 0; k < events.size(); ++k) {
    const auto& e = events[k];
    ann.false_alarm_faces[k] = e.at("false_alarm_faces").get<std::vector<int>>();
    ann.false_alarm_devices[k] = e.at("false_alarm_devices").get<std::vector<int>>();
    ann.nonpoi_samples[k] = e.at("nonpoi_samples").get<int>();
  }
  return ann;
}

std::map<std::int64_t, int> read_truth_jsonl(const std::string& path) {
  std::ifstream in = open_in(path);
  std::map<std::int64_t, int> truth;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    truth[obj.at("sample_id").get<std::int64_t>()] = obj.at("truth").get<int>();
  }
  return truth;
}

void write_labels_jsonl(const std::string& path, const Dataset& ds,
                        const RunResult& result) {
  std::ofstream out = open_out(path);
  for (int i = 0; i < ds.num_samples(); ++i) {
    const SoftLabel& s = result.soft[static_cast<std::size_t>(i)];
    ordered_json obj;
    obj["sample_id"] = ds.samples[static_cast<std::size_t>(i)].sample_id;
    obj["soft"] = vec_to_json(s.probs);
    obj["hard"] = result.hard[static_cast<std::size_t>(i)]
                      ? json(*result.hard[static_cast<std::size_t>(i)])
                      : json(kNonPoi);
    obj["flag_non_poi"] = s.non_poi_candidate();
    out << obj.dump() << '\n';
  }
}

std::vector<LabelRow> read_labels_jsonl(const std::string& path) {
  std::ifstream in = open_in(path);
  std::vector<LabelRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    LabelRow row;
    row.sample_id = obj.at("sample_id").get<std::int64_t>();
    const auto& soft = obj.at("soft");
    row.soft.resize(static_cast<Eigen::Index>(soft.size()));
    for (std::size_t j = 0; j < soft.size(); ++j)
      row.soft[static_cast<Eigen::Index>(j)] = soft[j].get<double>();
    const int hard = obj.at("hard").get<int>();
    if (hard != kNonPoi) row.hard = hard;
    row.flag_non_poi = obj.at("flag_non_poi").get<bool>();
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ScoreRow> read_scores_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ": empty scores file");
  std::vector<ScoreRow> rows;
  std::size_t line_no = 1;
  Eigen::Index m = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> fields;
    std::size_t begin = 0;
    while (begin <= line.size()) {
      std::size_t end = line.find(',', begin);
      if (end == std::string::npos) end = line.size();
      const std::string tok = line.substr(begin, end - begin);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": bad number '" + tok + "'");
      fields.push_back(v);
      begin = end + 1;
    }
    if (fields.size() < 2)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": too few columns");
    ScoreRow row;
    row.sample_id = static_cast<std::int64_t>(fields[0]);
    row.scores.resize(static_cast<Eigen::Index>(fields.size()) - 1);
    for (std::size_t j = 1; j < fields.size(); ++j)
      row.scores[static_cast<Eigen::Index>(j - 1)] = fields[j];
    if (m < 0) m = row.scores.size();
    if (row.scores.size() != m)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": inconsistent column count");
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_attendance_csv(const std::string& path, const Dataset& ds,
                          const std::vector<AttendanceVector>& attendance) {
  std::ofstream out = open_out(path);
  out << "event_id";
  for (const Identity& id : ds.identities) out << ',' << id.name;
  out << '\n';
  for (std::size_t k = 0; k < attendance.size(); ++k) {
    out << k;
    for (Eigen::Index j = 0; j < attendance[k].size(); ++j)
      out << ',' << format_double(attendance[k][j]);
    out << '\n';
  }
}

void write_history_json(const std::string& path, const RunResult& result,
                        const HyperParams& hyper) {
  ordered_json iterations = ordered_json::array();
  for (const IterationRecord& rec : result.history) {
    ordered_json it;
    it["tau"] = rec.tau;
    it["rms_change"] = rec.rms_change;
    if (rec.training) {
      it["initial_val_loss"] = rec.training->initial_val_loss;
      it["best_val_loss"] = rec.training->best_val_loss;
      it["best_epoch"] = rec.training->best_epoch;
      it["final_softmax_ce"] = rec.training->final_softmax_ce;
      it["final_stoc_center"] = rec.training->final_stoc_center;
    }
    iterations.push_back(std::move(it));
  }
  ordered_json root;
  root["mode"] = run_mode_name(result.mode);
  root["exit_reason"] = exit_reason_name(result.exit_reason);
  root["iterations"] = std::move(iterations);
  root["hyper"] = {
      {"beta", hyper.beta},
      {"gamma", hyper.gamma},
      {"xi", hyper.xi},
      {"lambda_stoc", hyper.lambda_stoc},
      {"g_multipliers", {hyper.g_mult_lo, hyper.g_mult_hi}},
      {"rss_threshold_dbm", hyper.rss_threshold_dbm},
      {"slot_hours", hyper.slot_hours},
      {"binarize_threshold", hyper.binarize_threshold},
      {"max_iterations", hyper.max_iterations},
      {"attendance_estimator", attendance_estimator_name(hyper.attendance_estimator)},
      {"seed", hyper.seed},
  };
  std::ofstream out = open_out(path);
  out << root.dump(2) << '\n';
}

void write_checkpoint_json(const std::string& path, const AdapterModel& model,
                           const HyperParams& hyper) {
  ordered_json root;
  root["format_version"] = 1;
  root["d"] = model.input_dim();
  root["d_prime"] = model.output_dim();
  root["m"] = model.num_classes();
  root["trained"] = model.trained;
  root["A"] = mat_to_json(model.A);
  root["W"] = mat_to_json(model.W);
  root["b"] = vec_to_json(model.b);
  root["hyper"] = {
      {"beta", hyper.beta},
      {"gamma", hyper.gamma},
      {"xi", hyper.xi},
      {"lambda_stoc", hyper.lambda_stoc},
      {"seed", hyper.seed},
  };
  std::ofstream out = open_out(path);
  out << root.dump(2) << '\n';
}

AdapterModel read_checkpoint_json(const std::string& path) {
  std::ifstream in = open_in(path);
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  if (root.at("format_version").get<int>() != 1)
    throw std::runtime_error(path + ": unsupported checkpoint format version");
  AdapterModel model;
  model.A = mat_from_json(root.at("A"));
  model.W = mat_from_json(root.at("W"));
  const auto& b = root.at("b");
  model.b.resize(static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < b.size(); ++i)
    model.b[static_cast<Eigen::Index>(i)] = b[i].get<double>();
  model.trained = root.at("trained").get<bool>();
  if (model.A.rows() != root.at("d_prime").get<int>() ||
      model.A.cols() != root.at("d").get<int>() ||
      model.W.rows() != root.at("m").get<int>())
    throw std::runtime_error(path + ": checkpoint dimensions are inconsistent");
  return model;
}

void write_labeling_metrics_csv(const std::string& path, const LabelingMetrics& m) {
  std::ofstream out = open_out(path);
  out << "tp,fp,fn,tn,precision,recall,f1,accuracy\n";
  out << m.tp << ',' << m.fp << ',' << m.fn << ',' << m.tn << ','
      << format_double(m.precision) << ',' << format_double(m.recall) << ','
      << format_double(m.f1) << ',' << format_double(m.accuracy) << '\n';
}

void write_confusion_csv(const std::string& path, const Mat& confusion) {
  std::ofstream out = open_out(path);
  for (Eigen::Index r = 0; r < confusion.rows(); ++r) {
    for (Eigen::Index c = 0; c < confusion.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_double(confusion(r, c));
    }
    out << '\n';
  }
}

void write_cmc_csv(const std::string& path, const std::vector<double>& curve) {
  std::ofstream out = open_out(path);
  out << "rank,accuracy\n";
  for (std::size_t k = 0; k < curve.size(); ++k)
    out << (k + 1) << ',' << format_double(curve[k]) << '\n';
}

void write_noise_report_csv(const std::string& path,
                            const std::vector<NoiseReportRow>& rows) {
  std::ofstream out = open_out(path);
  out << "event_id,false_alarm_faces,false_alarm_devices,nonpoi_samples\n";
  for (const NoiseReportRow& row : rows)
    out << row.event_id << ',' << row.false_alarm_faces << ','
        << row.false_alarm_devices << ',' << row.nonpoi_samples << '\n';
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream out = open_out(path);
  out << "value,mean_f1,std_f1,mean_iterations\n";
  for (const SweepRow& row : rows)
    out << format_double(row.value) << ',' << format_double(row.mean_f1) << ','
        << format_double(row.std_f1) << ',' << format_double(row.mean_iterations)
        << '\n';
}

}  // namespace crosstune
