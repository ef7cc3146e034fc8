#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "crosstune/ingestion.hpp"

using namespace crosstune;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content) {
    path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream out(path, std::ios::trunc);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

std::vector<Identity> two_identities() {
  return {Identity{0, "ada", "02:00:00:00:00:00"},
          Identity{1, "bob", "02:00:00:00:00:01"}};
}

EmbeddingRecord embedding(std::int64_t id, std::int64_t ts, const std::string& loc) {
  EmbeddingRecord rec;
  rec.sample_id = id;
  rec.timestamp = ts;
  rec.location = loc;
  rec.feature = Vec::Ones(3) / std::sqrt(3.0);
  return rec;
}

SniffRecord sniff(std::int64_t ts, const std::string& mac, const std::string& loc,
                  double rss = -40.0) {
  return SniffRecord{ts, mac, rss, loc};
}

}  // namespace

TEST_CASE("canonical_mac accepts separators and normalizes case") {
  CHECK(canonical_mac("AA:BB:CC:00:00:01") == "aa:bb:cc:00:00:01");
  CHECK(canonical_mac("aa-bb-cc-dd-ee-ff") == "aa:bb:cc:dd:ee:ff");
  CHECK_FALSE(canonical_mac("aa:bb:cc:dd:ee").has_value());
  CHECK_FALSE(canonical_mac("zz:bb:cc:dd:ee:ff").has_value());
  CHECK_FALSE(canonical_mac("hello").has_value());
}

TEST_CASE("parse_sniff_log reads rows and skips malformed ones") {
  TempFile file("ct_sniff.csv",
                "timestamp,mac,rss_dbm,location\n"
                "1700000000,AA:BB:CC:00:00:01,-40,office\n"
                "1700000001,AA:BB:CC:00:00:02,abc,office\n"
                "1700000002,AA:BB:CC:00:00:03,-52.5,kitchen\n"
                "1700000003,AA:BB:CC:00:00:04,-41,office\n"
                "1700000004,AA:BB:CC:00:00:05,-42,office\n"
                "1700000005,AA:BB:CC:00:00:06,-43,office\n"
                "1700000006,AA:BB:CC:00:00:07,-44,office\n"
                "1700000007,AA:BB:CC:00:00:08,-45,office\n"
                "1700000008,AA:BB:CC:00:00:09,-46,office\n"
                "1700000009,AA:BB:CC:00:00:0a,-47,office\n"
                "1700000010,AA:BB:CC:00:00:0b,-48,office\n");
  SniffParseStats stats;
  const auto records = parse_sniff_log(file.path, &stats);
  CHECK(records.size() == 10);
  CHECK(stats.total_rows == 11);
  CHECK(stats.malformed_rows == 1);
  CHECK(records[0].mac == "aa:bb:cc:00:00:01");
  CHECK(records[1].rss_dbm == -52.5);
}

TEST_CASE("parse_sniff_log edge cases") {
  SUBCASE("header only gives an empty list") {
    TempFile file("ct_sniff_empty.csv", "timestamp,mac,rss_dbm,location\n");
    CHECK(parse_sniff_log(file.path).empty());
  }
  SUBCASE("missing file raises an io error") {
    CHECK_THROWS_AS(parse_sniff_log("/nonexistent/sniff.csv"), std::runtime_error);
  }
  SUBCASE("too many malformed rows raise a format error") {
    TempFile file("ct_sniff_bad.csv",
                  "timestamp,mac,rss_dbm,location\n"
                  "x,y,z,w\n"
                  "1700000000,AA:BB:CC:00:00:01,-40,office\n");
    CHECK_THROWS_AS(parse_sniff_log(file.path), std::runtime_error);
  }
  SUBCASE("positive rss is malformed") {
    TempFile file("ct_sniff_pos.csv",
                  "timestamp,mac,rss_dbm,location\n"
                  "1,AA:BB:CC:00:00:01,-40,office\n"
                  "2,AA:BB:CC:00:00:01,-41,office\n"
                  "3,AA:BB:CC:00:00:01,-42,office\n"
                  "4,AA:BB:CC:00:00:01,-43,office\n"
                  "5,AA:BB:CC:00:00:01,-44,office\n"
                  "6,AA:BB:CC:00:00:01,-45,office\n"
                  "7,AA:BB:CC:00:00:01,-46,office\n"
                  "8,AA:BB:CC:00:00:01,-47,office\n"
                  "9,AA:BB:CC:00:00:01,-48,office\n"
                  "10,AA:BB:CC:00:00:01,5,office\n");
    SniffParseStats stats;
    const auto records = parse_sniff_log(file.path, &stats);
    CHECK(records.size() == 9);
    CHECK(stats.malformed_rows == 1);
  }
}

TEST_CASE("filter_by_rss keeps the boundary") {
  const std::vector<SniffRecord> records = {
      sniff(1, "aa:bb:cc:00:00:01", "office", -40.0),
      sniff(2, "aa:bb:cc:00:00:02", "office", -60.0),
      sniff(3, "aa:bb:cc:00:00:03", "office", -55.0),
  };
  const auto kept = filter_by_rss(records, -55.0);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].rss_dbm == -40.0);
  CHECK(kept[1].rss_dbm == -55.0);
  CHECK_THROWS_AS(filter_by_rss(records, std::nan("")), std::invalid_argument);
}

TEST_CASE("segment_events buckets by day, slot and location") {
  // 09:30 face + 09:45 MAC with 2h slots -> same bucket, slot index 4
  const std::int64_t day0_0930 = 9 * 3600 + 1800;
  const std::int64_t day0_0945 = 9 * 3600 + 2700;
  const auto identities = two_identities();
  const Dataset ds = segment_events({embedding(0, day0_0930, "office")},
                                    {sniff(day0_0945, "02:00:00:00:00:01", "office")},
                                    identities, 2);
  REQUIRE(ds.num_events() == 1);
  CHECK(ds.events[0].slot_index == 4);
  CHECK(ds.events[0].day == 0);
  CHECK(ds.events[0].attendance[1] == 1.0);
  CHECK(ds.events[0].attendance[0] == 0.0);
  REQUIRE(ds.events[0].sample_rows.size() == 1);
}

TEST_CASE("segment_events drops buckets with neither modality") {
  const auto identities = two_identities();
  // a non-POI MAC alone does not create an event
  CHECK_THROWS_AS(segment_events({}, {sniff(100, "ff:ff:ff:00:00:99", "office")},
                                 identities, 2),
                  std::runtime_error);

  // faces without MACs create an all-zero attendance event
  const Dataset ds = segment_events({embedding(0, 100, "office")}, {}, identities, 2);
  REQUIRE(ds.num_events() == 1);
  CHECK(ds.events[0].attendance.maxCoeff() == 0.0);
}

TEST_CASE("segment_events is invariant to input row order") {
  const auto identities = two_identities();
  std::vector<EmbeddingRecord> embeddings;
  std::vector<SniffRecord> sniffs;
  for (int i = 0; i < 12; ++i) {
    embeddings.push_back(embedding(i, 3600 * (2 * (i % 4)) + 60 + i, i % 2 ? "a" : "b"));
    sniffs.push_back(sniff(3600 * (2 * (i % 4)) + 30,
                           i % 2 ? "02:00:00:00:00:00" : "02:00:00:00:00:01",
                           i % 2 ? "a" : "b"));
  }
  const Dataset base = segment_events(embeddings, sniffs, identities, 2);

  std::reverse(embeddings.begin(), embeddings.end());
  std::reverse(sniffs.begin(), sniffs.end());
  const Dataset reversed = segment_events(embeddings, sniffs, identities, 2);

  REQUIRE(base.num_events() == reversed.num_events());
  REQUIRE(base.num_samples() == reversed.num_samples());
  CHECK((base.features - reversed.features).cwiseAbs().maxCoeff() == 0.0);
  for (int k = 0; k < base.num_events(); ++k) {
    CHECK(base.events[static_cast<std::size_t>(k)].location ==
          reversed.events[static_cast<std::size_t>(k)].location);
    CHECK(base.events[static_cast<std::size_t>(k)].sample_rows ==
          reversed.events[static_cast<std::size_t>(k)].sample_rows);
    CHECK((base.events[static_cast<std::size_t>(k)].attendance -
           reversed.events[static_cast<std::size_t>(k)].attendance)
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }

  // every sample appears in exactly one event
  std::vector<int> seen(static_cast<std::size_t>(base.num_samples()), 0);
  for (const Event& e : base.events)
    for (int r : e.sample_rows) ++seen[static_cast<std::size_t>(r)];
  for (int c : seen) CHECK(c == 1);

  // initial attendance is binary
  for (const Event& e : base.events)
    for (Eigen::Index j = 0; j < e.attendance.size(); ++j)
      CHECK((e.attendance[j] == 0.0 || e.attendance[j] == 1.0));
}

TEST_CASE("segment_events respects the location filter") {
  const auto identities = two_identities();
  const Dataset ds = segment_events(
      {embedding(0, 100, "office"), embedding(1, 100, "kitchen")},
      {sniff(130, "02:00:00:00:00:00", "office")}, identities, 2, {"office"});
  CHECK(ds.num_events() == 1);
  CHECK(ds.num_samples() == 1);
}

TEST_CASE("segment_events rejects bad slot width and unknown truth") {
  const auto identities = two_identities();
  CHECK_THROWS_AS(segment_events({}, {}, identities, 5), std::invalid_argument);

  EmbeddingRecord rec = embedding(0, 100, "office");
  rec.truth = "who_is_this";
  CHECK_THROWS_AS(segment_events({rec}, {}, identities, 2), std::runtime_error);

  rec.truth = std::string(kNonPoiTruth);
  const Dataset ds = segment_events({rec}, {}, identities, 2);
  CHECK(ds.samples[0].truth == kNonPoi);
}

TEST_CASE("parse_identities validates the registry") {
  TempFile good("ct_ids.csv", "index,name,mac\n0,ada,02:00:00:00:00:00\n1,bob,02:00:00:00:00:01\n");
  const auto ids = parse_identities(good.path);
  REQUIRE(ids.size() == 2);
  CHECK(ids[0].name == "ada");
  CHECK(ids[1].mac == "02:00:00:00:00:01");

  TempFile sparse("ct_ids_sparse.csv", "index,name,mac\n0,ada,02:00:00:00:00:00\n2,bob,02:00:00:00:00:01\n");
  CHECK_THROWS_AS(parse_identities(sparse.path), std::runtime_error);
}

TEST_CASE("parse_embeddings enforces a constant feature length") {
  TempFile bad("ct_emb.jsonl",
               R"({"sample_id":0,"timestamp":1,"location":"a","feature":[1.0,0.0],"truth":null})"
               "\n"
               R"({"sample_id":1,"timestamp":2,"location":"a","feature":[1.0],"truth":null})"
               "\n");
  CHECK_THROWS_AS(parse_embeddings(bad.path), std::runtime_error);
}
