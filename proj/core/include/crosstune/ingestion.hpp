#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crosstune/types.hpp"

namespace crosstune {

struct SniffRecord {
  std::int64_t timestamp = 0;  // UTC seconds
  std::string mac;             // canonical lower-case colon-separated
  double rss_dbm = 0.0;
  std::string location;
};

struct EmbeddingRecord {
  std::int64_t sample_id = 0;
  std::int64_t timestamp = 0;
  std::string location;
  Vec feature;
  std::optional<std::string> truth;
};

/// "non_poi" in an embedding record's truth field marks a subject outside
/// the identity set; any other string must name a known identity.
inline constexpr const char* kNonPoiTruth = "non_poi";

/// Lower-cases and colon-joins a MAC given as 6 hex pairs separated by
/// ':' or '-'. Returns nullopt when the string is not a MAC.
std::optional<std::string> canonical_mac(const std::string& raw);

struct SniffParseStats {
  std::size_t total_rows = 0;
  std::size_t malformed_rows = 0;
};

/// Parses a sniff log CSV with header `timestamp,mac,rss_dbm,location`.
/// Malformed rows are skipped and counted; more than 10% malformed rows is
/// a format error. Throws std::runtime_error on I/O or format problems.
std::vector<SniffRecord> parse_sniff_log(const std::string& path,
                                         SniffParseStats* stats = nullptr);

/// Parses embeddings JSONL, one object per line:
/// {"sample_id":int,"timestamp":int,"location":str,"feature":[..],"truth":str|null}
/// Feature length must be constant across the file.
std::vector<EmbeddingRecord> parse_embeddings(const std::string& path);

/// Parses the identity registry CSV with header `index,name,mac`.
std::vector<Identity> parse_identities(const std::string& path);

/// Keeps records with rss_dbm >= threshold (boundary inclusive).
std::vector<SniffRecord> filter_by_rss(const std::vector<SniffRecord>& records,
                                       double threshold_dbm);

/// Buckets embeddings and sniffs into (day, slot, location) events and builds
/// the initial binary attendance vectors: u0[j] = 1 iff identity j's MAC was
/// sniffed in the bucket. Buckets with neither face samples nor POI MACs are
/// discarded; sniffs of unregistered MACs are ignored. `locations`, when
/// non-empty, restricts which locations are bucketed at all.
/// Pure function of its inputs: permuting input rows yields the same Dataset.
Dataset segment_events(const std::vector<EmbeddingRecord>& embeddings,
                       const std::vector<SniffRecord>& sniffs,
                       const std::vector<Identity>& identities,
                       int slot_hours,
                       const std::vector<std::string>& locations = {});

}  // namespace crosstune
