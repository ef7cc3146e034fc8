#include <doctest.h>

#include "crosstune/types.hpp"
#include "helpers.hpp"

using namespace crosstune;
using test_helpers::vec;

TEST_CASE("fuzzy_overlap on identical binary vectors") {
  const auto [inter, uni] = fuzzy_overlap(vec({1, 1, 0}), vec({1, 1, 0}));
  CHECK(inter == 2.0);
  CHECK(uni == 2.0);
}

TEST_CASE("fuzzy_overlap hand cases") {
  {
    const auto [inter, uni] = fuzzy_overlap(vec({1, 1, 0}), vec({1, 0, 1}));
    CHECK(inter == 1.0);
    CHECK(uni == 3.0);
  }
  {
    const auto [inter, uni] = fuzzy_overlap(vec({0.5, 0.2}), vec({0.4, 0.8}));
    CHECK(inter == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(uni == doctest::Approx(1.3).epsilon(1e-12));
  }
}

TEST_CASE("fuzzy_overlap rejects length mismatch") {
  CHECK_THROWS_AS(fuzzy_overlap(vec({1, 0}), vec({1, 0, 0})), std::invalid_argument);
}

TEST_CASE("fuzzy_overlap is symmetric and bounded") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 1 + static_cast<int>(rng.uniform_int(std::uint64_t{6}));
    Vec a(m), b(m);
    for (int i = 0; i < m; ++i) {
      a[i] = rng.uniform();
      b[i] = rng.uniform();
    }
    const auto ab = fuzzy_overlap(a, b);
    const auto ba = fuzzy_overlap(b, a);
    CHECK(ab.intersection_mass == ba.intersection_mass);
    CHECK(ab.union_mass == ba.union_mass);
    CHECK(ab.intersection_mass <= ab.union_mass);
  }
}

TEST_CASE("fuzzy_overlap equals logical AND/OR on binary vectors") {
  // exhaustive over all pairs of binary vectors up to length 4
  for (int m = 1; m <= 4; ++m) {
    for (int a_bits = 0; a_bits < (1 << m); ++a_bits) {
      for (int b_bits = 0; b_bits < (1 << m); ++b_bits) {
        Vec a(m), b(m);
        int and_count = 0, or_count = 0;
        for (int i = 0; i < m; ++i) {
          const int ai = (a_bits >> i) & 1;
          const int bi = (b_bits >> i) & 1;
          a[i] = ai;
          b[i] = bi;
          and_count += ai & bi;
          or_count += ai | bi;
        }
        const auto [inter, uni] = fuzzy_overlap(a, b);
        CHECK(inter == static_cast<double>(and_count));
        CHECK(uni == static_cast<double>(or_count));
      }
    }
  }
}

TEST_CASE("validate_dataset accepts a well-formed dataset") {
  Rng rng(3);
  Mat features = test_helpers::random_unit_rows(rng, 4, 8);
  Dataset ds = test_helpers::make_dataset(2, {0, 0, 1, 1}, features,
                                          {vec({1, 0}), vec({0, 1})});
  CHECK(validate_dataset(ds).empty());
}

TEST_CASE("validate_dataset flags dangling event ids and bad attendance") {
  Rng rng(4);
  Mat features = test_helpers::random_unit_rows(rng, 3, 4);
  Dataset ds = test_helpers::make_dataset(2, {0, 0, 1}, features,
                                          {vec({1, 0}), vec({0, 1})});

  SUBCASE("dangling event id") {
    ds.samples[2].event_id = 9;
    const auto report = validate_dataset(ds);
    CHECK(report.size() >= 1);
  }
  SUBCASE("attendance entry above one") {
    ds.events[0].attendance[0] = 1.2;
    const auto report = validate_dataset(ds);
    REQUIRE(report.size() == 1);
    CHECK(report[0].find("outside [0,1]") != std::string::npos);
  }
  SUBCASE("empty event") {
    ds.events[1].sample_rows.clear();
    ds.events[1].attendance.setZero();
    ds.samples[2].event_id = 0;
    ds.events[0].sample_rows.push_back(2);
    const auto report = validate_dataset(ds);
    REQUIRE(report.size() == 1);
    CHECK(report[0].find("neither") != std::string::npos);
  }
}

TEST_CASE("hyperparams validation names the offending field") {
  HyperParams hp;
  hp.gamma = 1.5;
  try {
    hp.validate();
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("gamma") != std::string::npos);
  }
}
