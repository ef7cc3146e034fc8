#include "crosstune/ingestion.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "crosstune/log.hpp"

namespace crosstune {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::optional<double> parse_double(const std::string& s) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

std::optional<std::int64_t> parse_int(const std::string& s) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

}  // namespace

std::optional<std::string> canonical_mac(const std::string& raw) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : raw) {
    if (c == ':' || c == '-') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  if (parts.size() != 6) return std::nullopt;
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].size() != 2) return std::nullopt;
    for (char c : parts[i]) {
      if (!std::isxdigit(static_cast<unsigned char>(c))) return std::nullopt;
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (i + 1 < parts.size()) out.push_back(':');
  }
  return out;
}

std::vector<SniffRecord> parse_sniff_log(const std::string& path,
                                         SniffParseStats* stats) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ": empty sniff log (missing header)");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "timestamp,mac,rss_dbm,location")
    throw std::runtime_error(path + ": unexpected sniff log header '" + line + "'");

  std::vector<SniffRecord> records;
  SniffParseStats local;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++local.total_rows;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      ++local.malformed_rows;
      continue;
    }
    const auto ts = parse_int(fields[0]);
    const auto mac = canonical_mac(fields[1]);
    const auto rss = parse_double(fields[2]);
    if (!ts || !mac || !rss || *rss > 0.0 || fields[3].empty()) {
      ++local.malformed_rows;
      continue;
    }
    records.push_back(SniffRecord{*ts, *mac, *rss, fields[3]});
  }
  if (local.total_rows > 0 &&
      10 * local.malformed_rows > local.total_rows) {
    throw std::runtime_error(path + ": " + std::to_string(local.malformed_rows) +
                             " of " + std::to_string(local.total_rows) +
                             " sniff rows malformed (>10%)");
  }
  if (local.malformed_rows > 0)
    CT_WARN("%s: skipped %zu malformed sniff rows", path.c_str(),
            local.malformed_rows);
  if (stats) *stats = local;
  return records;
}

std::vector<EmbeddingRecord> parse_embeddings(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<EmbeddingRecord> records;
  std::string line;
  std::size_t line_no = 0;
  Eigen::Index dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    EmbeddingRecord rec;
    try {
      rec.sample_id = obj.at("sample_id").get<std::int64_t>();
      rec.timestamp = obj.at("timestamp").get<std::int64_t>();
      rec.location = obj.at("location").get<std::string>();
      const auto& feat = obj.at("feature");
      rec.feature.resize(static_cast<Eigen::Index>(feat.size()));
      for (std::size_t i = 0; i < feat.size(); ++i)
        rec.feature[static_cast<Eigen::Index>(i)] = feat[i].get<double>();
      if (obj.contains("truth") && !obj["truth"].is_null())
        rec.truth = obj["truth"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (dim < 0) dim = rec.feature.size();
    if (rec.feature.size() != dim)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": feature length " + std::to_string(rec.feature.size()) +
                               " differs from earlier length " + std::to_string(dim));
    if (!rec.feature.allFinite())
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": non-finite feature entries");
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<Identity> parse_identities(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ": empty identities file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "index,name,mac")
    throw std::runtime_error(path + ": unexpected identities header '" + line + "'");

  std::vector<Identity> identities;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 3 fields");
    const auto idx = parse_int(fields[0]);
    const auto mac = canonical_mac(fields[2]);
    if (!idx || fields[1].empty() || !mac)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed identity row");
    identities.push_back(Identity{static_cast<int>(*idx), fields[1], *mac});
  }
  std::sort(identities.begin(), identities.end(),
            [](const Identity& a, const Identity& b) { return a.index < b.index; });
  for (std::size_t j = 0; j < identities.size(); ++j) {
    if (identities[j].index != static_cast<int>(j))
      throw std::runtime_error(path + ": identity indices are not dense starting at 0");
  }
  return identities;
}

std::vector<SniffRecord> filter_by_rss(const std::vector<SniffRecord>& records,
                                       double threshold_dbm) {
  if (!std::isfinite(threshold_dbm))
    throw std::invalid_argument("filter_by_rss: threshold must be finite");
  std::vector<SniffRecord> kept;
  kept.reserve(records.size());
  for (const auto& r : records)
    if (r.rss_dbm >= threshold_dbm) kept.push_back(r);
  return kept;
}

Dataset segment_events(const std::vector<EmbeddingRecord>& embeddings,
                       const std::vector<SniffRecord>& sniffs,
                       const std::vector<Identity>& identities,
                       int slot_hours,
                       const std::vector<std::string>& locations) {
  if (slot_hours < 1 || 24 % slot_hours != 0)
    throw std::invalid_argument("segment_events: slot_hours must divide 24");

  const int m = static_cast<int>(identities.size());
  std::unordered_map<std::string, int> mac_to_identity;
  for (const auto& id : identities) mac_to_identity[id.mac] = id.index;

  const std::int64_t slot_seconds = static_cast<std::int64_t>(slot_hours) * 3600;
  auto bucket_of = [&](std::int64_t ts, const std::string& loc) {
    const std::int64_t day = ts >= 0 ? ts / 86400 : (ts - 86399) / 86400;
    const std::int64_t sec_of_day = ts - day * 86400;
    const int slot = static_cast<int>(sec_of_day / slot_seconds);
    return std::make_tuple(day, slot, loc);
  };
  auto location_allowed = [&](const std::string& loc) {
    return locations.empty() ||
           std::find(locations.begin(), locations.end(), loc) != locations.end();
  };

  using BucketKey = std::tuple<std::int64_t, int, std::string>;
  struct Bucket {
    std::vector<std::int64_t> sample_ids;
    std::vector<std::uint8_t> present;
  };
  std::map<BucketKey, Bucket> buckets;  // ordered: (day, slot, location)

  std::unordered_map<std::int64_t, const EmbeddingRecord*> by_sample_id;
  for (const auto& e : embeddings) {
    if (!location_allowed(e.location)) continue;
    if (!by_sample_id.emplace(e.sample_id, &e).second)
      throw std::runtime_error("duplicate sample_id " + std::to_string(e.sample_id));
    buckets[bucket_of(e.timestamp, e.location)].sample_ids.push_back(e.sample_id);
  }
  for (const auto& s : sniffs) {
    if (!location_allowed(s.location)) continue;
    const auto it = mac_to_identity.find(s.mac);
    if (it == mac_to_identity.end()) continue;  // non-POI MAC
    Bucket& b = buckets[bucket_of(s.timestamp, s.location)];
    if (b.present.empty()) b.present.assign(static_cast<std::size_t>(m), 0);
    b.present[static_cast<std::size_t>(it->second)] = 1;
  }

  Dataset ds;
  ds.identities = identities;

  // Sample order is by sample_id so the feature matrix layout does not
  // depend on input row order.
  std::vector<std::int64_t> sorted_ids;
  sorted_ids.reserve(by_sample_id.size());
  for (const auto& [sid, rec] : by_sample_id) {
    (void)rec;
    sorted_ids.push_back(sid);
  }
  std::sort(sorted_ids.begin(), sorted_ids.end());

  std::unordered_map<std::string, int> name_to_identity;
  for (const auto& id : identities) name_to_identity[id.name] = id.index;

  const Eigen::Index d =
      sorted_ids.empty() ? 0 : by_sample_id.at(sorted_ids.front())->feature.size();
  ds.dim = static_cast<int>(d);
  ds.features.resize(static_cast<Eigen::Index>(sorted_ids.size()), d);

  std::unordered_map<std::int64_t, int> row_of;
  for (std::size_t i = 0; i < sorted_ids.size(); ++i) {
    const EmbeddingRecord& rec = *by_sample_id.at(sorted_ids[i]);
    FaceSample s;
    s.sample_id = rec.sample_id;
    if (rec.truth) {
      if (*rec.truth == kNonPoiTruth) {
        s.truth = kNonPoi;
      } else {
        const auto it = name_to_identity.find(*rec.truth);
        if (it == name_to_identity.end())
          throw std::runtime_error("embedding sample " + std::to_string(rec.sample_id) +
                                   " has unknown truth '" + *rec.truth + "'");
        s.truth = it->second;
      }
    }
    ds.features.row(static_cast<Eigen::Index>(i)) = rec.feature.transpose();
    row_of[rec.sample_id] = static_cast<int>(i);
    ds.samples.push_back(std::move(s));
  }

  for (const auto& [key, bucket] : buckets) {
    const bool any_mac =
        std::any_of(bucket.present.begin(), bucket.present.end(),
                    [](std::uint8_t p) { return p != 0; });
    if (bucket.sample_ids.empty() && !any_mac) continue;  // neither modality

    Event ev;
    ev.event_id = ds.num_events();
    ev.day = std::get<0>(key);
    ev.slot_index = std::get<1>(key);
    ev.location = std::get<2>(key);
    ev.attendance = Vec::Zero(m);
    for (int j = 0; j < m; ++j)
      if (!bucket.present.empty() && bucket.present[static_cast<std::size_t>(j)])
        ev.attendance[j] = 1.0;
    ev.sample_rows.reserve(bucket.sample_ids.size());
    std::vector<std::int64_t> ids = bucket.sample_ids;
    std::sort(ids.begin(), ids.end());
    for (std::int64_t sid : ids) {
      const int row = row_of.at(sid);
      ds.samples[static_cast<std::size_t>(row)].event_id = ev.event_id;
      ev.sample_rows.push_back(row);
    }
    ds.events.push_back(std::move(ev));
  }

  if (ds.events.empty())
    throw std::runtime_error("segment_events: no events survive segmentation");
  return ds;
}

}  // namespace crosstune
