#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "edgeplan/trace.hpp"

using namespace edgeplan;

namespace {

const char* kStationsAB = "station_id,x,y\nA,0,0\nB,100,0\n";

ParsedTrace parse(const std::string& records, std::int64_t slot_len = 3600,
                  CalendarRule rule = {}) {
  std::istringstream st(kStationsAB);
  std::istringstream rec(records);
  return parse_trace(st, rec, slot_len, rule);
}

}  // namespace

TEST_CASE("request records are binned by start time") {
  auto parsed = parse(
      "start_time,end_time,station_id\n"
      "2023-05-01T08:00:10,2023-05-01T08:05:00,A\n"
      "2023-05-01T08:30:00,2023-05-01T09:30:00,A\n"
      "2023-05-01T09:15:00,2023-05-01T09:20:00,A\n");
  REQUIRE(parsed.series.frames.size() == 2);
  CHECK(parsed.series.frames[0].load == Vec{2.0, 0.0});
  CHECK(parsed.series.frames[1].load == Vec{1.0, 0.0});
  CHECK(parsed.request_level);
  // Total load equals the record count.
  double total = 0;
  for (const auto& fr : parsed.series.frames)
    for (double v : fr.load) total += v;
  CHECK(total == 3.0);
}

TEST_CASE("aggregated rows sum per slot and station") {
  auto parsed = parse(
      "timestamp,station_id,load\n"
      "2023-05-01T00:10:00,A,5\n"
      "2023-05-01T00:20:00,B,3\n");
  REQUIRE(parsed.series.frames.size() == 1);
  CHECK(parsed.series.frames[0].load == Vec{5.0, 3.0});
  CHECK_FALSE(parsed.request_level);
}

TEST_CASE("unknown station is rejected with its row number") {
  CHECK_THROWS_WITH_AS(parse("timestamp,station_id,load\n2023-05-01T00:00:00,Z,1\n"),
                       doctest::Contains("row 2"), TraceError);
  CHECK_THROWS_AS(parse("timestamp,station_id,load\n"), TraceError);  // empty trace
  CHECK_THROWS_AS(parse("timestamp,station_id,load\n2023-05-01T99:00:00,A,1\n"), TraceError);
  // decreasing timestamps
  CHECK_THROWS_AS(parse("timestamp,station_id,load\n"
                        "2023-05-01T02:00:00,A,1\n"
                        "2023-05-01T01:00:00,A,1\n"),
                  TraceError);
}

TEST_CASE("slots with no records are zero-filled") {
  auto parsed = parse(
      "timestamp,station_id,load\n"
      "2023-05-01T00:00:00,A,1\n"
      "2023-05-01T03:00:00,B,2\n");
  REQUIRE(parsed.series.frames.size() == 4);
  CHECK(parsed.series.frames[1].load == Vec{0.0, 0.0});
  CHECK(parsed.series.frames[2].load == Vec{0.0, 0.0});
}

TEST_CASE("calendar labels follow the weekend and holiday rule") {
  // 2023-05-01 was a Monday.
  CalendarRule rule;
  rule.holiday_dates.insert("2023-05-02");
  auto parsed = parse(
      "timestamp,station_id,load\n"
      "2023-05-01T10:00:00,A,1\n"   // Monday workday
      "2023-05-02T10:00:00,A,1\n"   // listed holiday
      "2023-05-06T10:00:00,A,1\n",  // Saturday
      3600, rule);
  auto day_of = [&](const char* date) {
    for (std::size_t i = 0; i < parsed.series.frames.size(); ++i) {
      if (civil_date(parsed.series.frames[i].timestamp) == date &&
          parsed.series.frames[i].load[0] > 0)
        return parsed.series.labels[i].day_class;
    }
    FAIL("frame not found");
    return DayClass::Workday;
  };
  CHECK(day_of("2023-05-01") == DayClass::Workday);
  CHECK(day_of("2023-05-02") == DayClass::Holiday);
  CHECK(day_of("2023-05-06") == DayClass::Holiday);
  // Default partition: six 4-hour periods; the first frame sits at 10:00,
  // which falls in period 2.
  CHECK(parsed.series.labels[0].period_id == 2);
}

TEST_CASE("grouping produces one representative per nonempty group") {
  TraceSeries series;
  series.slot_length = 3600;
  series.frames = {{0, 0, {1, 3}}, {1, 3600, {3, 1}}, {2, 7200, {9, 9}}};
  series.labels = {{DayClass::Workday, 0}, {DayClass::Workday, 0}, {DayClass::Holiday, 0}};

  auto avg = group_and_represent(series, RepresentativeMode::Average);
  REQUIRE(avg.count() == 2);
  CHECK(avg.vectors[0] == Vec{2.0, 2.0});
  CHECK(avg.vectors[1] == Vec{9.0, 9.0});
  CHECK(avg.group_keys[0].day_class == DayClass::Workday);
  CHECK(avg.group_keys[1].day_class == DayClass::Holiday);

  auto mx = group_and_represent(series, RepresentativeMode::ComponentMax);
  CHECK(mx.vectors[0] == Vec{3.0, 3.0});

  // Average is bounded componentwise by the component max.
  for (int l = 0; l < avg.count(); ++l)
    for (std::size_t m = 0; m < avg.vectors[l].size(); ++m)
      CHECK(avg.vectors[l][m] <= mx.vectors[l][m] + 1e-12);

  TraceSeries empty;
  CHECK_THROWS_AS(group_and_represent(empty, RepresentativeMode::Average), TraceError);
}

TEST_CASE("variation ratio") {
  TraceSeries series;
  series.slot_length = 3600;
  series.frames = {{0, 0, {2, 2}}, {1, 3600, {4, 0}}, {2, 7200, {2, 2}}, {3, 10800, {4, 0}}};
  series.labels.assign(4, {});

  SUBCASE("identical frames at the lag give zero") {
    auto vt = variation_ratio(series, 2);
    REQUIRE(vt.points.size() == 2);
    CHECK(vt.points[0].ratio == doctest::Approx(0.0));
    CHECK(vt.points[1].ratio == doctest::Approx(0.0));
  }
  SUBCASE("hand-evaluated ratios at lag 1") {
    auto vt = variation_ratio(series, 1);
    // |4-2|+|0-2| over 4 = 1.0
    CHECK(vt.points[0].ratio == doctest::Approx(1.0));
    CHECK(vt.points[1].ratio == doctest::Approx(1.0));
  }
  SUBCASE("single-station ratio") {
    TraceSeries s2;
    s2.frames = {{0, 0, {1}}, {1, 3600, {2}}};
    s2.labels.assign(2, {});
    auto vt = variation_ratio(s2, 1);
    CHECK(vt.points[0].ratio == doctest::Approx(1.0));
  }
  SUBCASE("scale invariance") {
    auto vt1 = variation_ratio(series, 1);
    TraceSeries scaled = series;
    for (auto& fr : scaled.frames)
      for (double& v : fr.load) v *= 7.5;
    auto vt2 = variation_ratio(scaled, 1);
    for (std::size_t i = 0; i < vt1.points.size(); ++i)
      CHECK(vt1.points[i].ratio == doctest::Approx(vt2.points[i].ratio));
  }
  SUBCASE("zero denominator slots are omitted and reported") {
    TraceSeries sz;
    sz.frames = {{0, 0, {0, 0}}, {1, 3600, {1, 1}}};
    sz.labels.assign(2, {});
    auto vt = variation_ratio(sz, 1);
    CHECK(vt.points.empty());
    CHECK(vt.skipped_slots == std::vector<std::int64_t>{1});
  }
  SUBCASE("series shorter than lag errors") {
    CHECK_THROWS_AS(variation_ratio(series, 4), TraceError);
  }
}

TEST_CASE("workload statistics") {
  TraceSeries series;
  series.frames = {{0, 0, {1, 2}}, {1, 3600, {3, 4}}};
  series.labels.assign(2, {});
  auto stats = workload_stats(series, nullptr);
  CHECK(stats.workload.mean == doctest::Approx(2.5));
  CHECK(stats.workload.max == doctest::Approx(4.0));
  CHECK_FALSE(stats.has_interarrival);
  // Percentile values are nonincreasing as the percentile decreases.
  double prev = stats.workload.max + 1;
  for (double p : kStatPercentiles) {
    double v = stats.workload.percentiles.at(p);
    CHECK(v <= prev + 1e-12);
    CHECK(stats.workload.max >= v - 1e-12);
    prev = v;
  }

  SUBCASE("constant data") {
    TraceSeries cs;
    cs.frames = {{0, 0, {5, 5}}, {1, 3600, {5, 5}}};
    cs.labels.assign(2, {});
    auto s = workload_stats(cs, nullptr);
    CHECK(s.workload.std_dev == doctest::Approx(0.0));
    for (double p : kStatPercentiles) CHECK(s.workload.percentiles.at(p) == doctest::Approx(5.0));
  }
  SUBCASE("single request per station leaves inter-arrival empty and flagged") {
    std::vector<std::vector<std::int64_t>> times = {{100}, {200}};
    auto s = workload_stats(series, &times);
    CHECK_FALSE(s.has_interarrival);
  }
  SUBCASE("inter-arrival gaps keep the input unit") {
    std::vector<std::vector<std::int64_t>> times = {{100, 160, 280}, {}};
    auto s = workload_stats(series, &times);
    CHECK(s.has_interarrival);
    CHECK(s.interarrival.mean == doctest::Approx(90.0));  // gaps 60 and 120
    CHECK(s.interarrival.max == doctest::Approx(120.0));
  }
}

TEST_CASE("synthetic bursts") {
  WorkloadFrame base{0, 0, {5, 5, 8, 2}};
  BurstSpec spec;
  spec.subset_min = 1;
  spec.subset_max = 2;
  spec.count = 50;
  spec.seed = 7;

  auto frames = synth_bursts(base, spec);
  REQUIRE(frames.size() == 50);
  for (const auto& fr : frames) {
    int changed = 0;
    for (std::size_t m = 0; m < base.load.size(); ++m) {
      CHECK(fr.load[m] >= base.load[m] - 1e-12);  // dominates the base
      bool unchanged = fr.load[m] == base.load[m];
      if (!unchanged) {
        ++changed;
        bool matches_factor = false;
        for (double f : spec.scale_factors)
          if (fr.load[m] == doctest::Approx(base.load[m] * f)) matches_factor = true;
        CHECK(matches_factor);
      }
    }
    CHECK(changed >= 1);
    CHECK(changed <= 2);
  }
  // Fixed seed reproduces bit-identically.
  auto again = synth_bursts(base, spec);
  for (std::size_t i = 0; i < frames.size(); ++i) CHECK(frames[i].load == again[i].load);

  SUBCASE("single forced scaling") {
    WorkloadFrame b2{0, 0, {5.0, 5.0}};
    BurstSpec s2;
    s2.subset_min = s2.subset_max = 1;
    s2.scale_factors = {2.0};
    s2.count = 8;
    s2.seed = 1;
    auto out = synth_bursts(b2, s2);
    for (const auto& fr : out) {
      bool station0 = fr.load == Vec{10.0, 5.0};
      bool station1 = fr.load == Vec{5.0, 10.0};
      CHECK((station0 || station1));
    }
  }
  SUBCASE("subset larger than M errors") {
    BurstSpec bad = spec;
    bad.subset_max = 9;
    CHECK_THROWS_AS(synth_bursts(base, bad), TraceError);
  }
}
