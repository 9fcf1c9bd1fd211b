#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "edgeplan/types.hpp"

namespace edgeplan {

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CalendarRule {
  // day_class = Holiday iff Saturday/Sunday or the civil date is listed here.
  std::set<std::string> holiday_dates;  // "YYYY-MM-DD"
  int periods_per_day = 6;              // equal-length periods
};

// Seconds since epoch for an ISO-8601 timestamp "YYYY-MM-DD[T ]HH:MM:SS".
std::int64_t parse_iso_timestamp(const std::string& text);

// Civil date "YYYY-MM-DD" and weekday (0 = Monday .. 6 = Sunday) of an epoch time.
std::string civil_date(std::int64_t epoch_seconds);
int weekday(std::int64_t epoch_seconds);

CalendarLabel label_for(std::int64_t slot_start, std::int64_t slot_length, const CalendarRule& rule);

StationSet parse_stations_csv(std::istream& in);

struct ParsedTrace {
  TraceSeries series;
  // Per-station request start times (seconds), present only for request-level
  // input; feeds the inter-arrival statistics.
  std::vector<std::vector<std::int64_t>> request_times;
  bool request_level = false;
};

// Accepts an aggregated trace (header timestamp,station_id,load) or a
// request-level trace (header start_time,end_time,station_id). Request rows
// are binned by start time; the load metric is the request count per slot.
// Slots are aligned to midnight of the first record's day, and stations with
// no records in a slot carry load 0.
ParsedTrace parse_trace(std::istream& stations_in, std::istream& records_in,
                        std::int64_t slot_length_seconds, const CalendarRule& rule);

RepresentativeSet group_and_represent(const TraceSeries& series, RepresentativeMode mode);

struct VariationPoint {
  std::int64_t slot_index;
  double ratio;
};

struct VariationSeries {
  std::vector<VariationPoint> points;
  std::vector<std::int64_t> skipped_slots;  // zero-denominator slots, omitted from points
};

// V_t against the frame lag_slots earlier: sum |w_m(t)-w_m(t-lag)| / sum w_m(t-lag).
VariationSeries variation_ratio(const TraceSeries& series, int lag_slots);

// Percentile set fixed to {99.999, 99.99, 99.9, 99, 90, 80, 70, 60, 50, 40}.
extern const std::vector<double> kStatPercentiles;

TraceStats workload_stats(const TraceSeries& series,
                          const std::vector<std::vector<std::int64_t>>* request_times);

// Each output frame scales a random station subset of the base frame by a
// random factor from spec.scale_factors; unselected components are unchanged.
std::vector<WorkloadFrame> synth_bursts(const WorkloadFrame& base, const BurstSpec& spec);

}  // namespace edgeplan
