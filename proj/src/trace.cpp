#include "edgeplan/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <unordered_map>

#include "edgeplan/rng.hpp"

namespace edgeplan {

namespace {

// Days since 1970-01-01 for a civil date (Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yr + (m <= 2));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

std::int64_t parse_iso_timestamp(const std::string& text) {
  int y, mo, d, h, mi, s;
  char sep;
  if (std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h, &mi, &s) != 7 ||
      (sep != 'T' && sep != ' ') || mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 ||
      mi < 0 || mi > 59 || s < 0 || s > 60) {
    throw TraceError("unparsable timestamp: '" + text + "'");
  }
  return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

std::string civil_date(std::int64_t epoch_seconds) {
  std::int64_t days = epoch_seconds / 86400;
  if (epoch_seconds < 0 && epoch_seconds % 86400 != 0) --days;
  int y, m, d;
  civil_from_days(days, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
  return buf;
}

int weekday(std::int64_t epoch_seconds) {
  std::int64_t days = epoch_seconds / 86400;
  if (epoch_seconds < 0 && epoch_seconds % 86400 != 0) --days;
  // 1970-01-01 was a Thursday (weekday 3 with Monday = 0).
  return static_cast<int>(((days % 7) + 7 + 3) % 7);
}

CalendarLabel label_for(std::int64_t slot_start, std::int64_t slot_length, const CalendarRule& rule) {
  CalendarLabel label;
  int wd = weekday(slot_start);
  bool holiday = wd >= 5 || rule.holiday_dates.count(civil_date(slot_start)) > 0;
  label.day_class = holiday ? DayClass::Holiday : DayClass::Workday;
  std::int64_t sec_of_day = ((slot_start % 86400) + 86400) % 86400;
  std::int64_t period_len = 86400 / std::max(1, rule.periods_per_day);
  label.period_id = static_cast<int>(std::min<std::int64_t>(sec_of_day / period_len,
                                                            rule.periods_per_day - 1));
  (void)slot_length;
  return label;
}

StationSet parse_stations_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw TraceError("stations file is empty");
  auto header = split_csv_line(line);
  if (header.size() < 3 || trim(header[0]) != "station_id" || trim(header[1]) != "x" ||
      trim(header[2]) != "y")
    throw TraceError("stations file must have header station_id,x,y");
  StationSet set;
  std::set<std::string> seen;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() < 3) throw TraceError("stations row " + std::to_string(row) + ": expected 3 columns");
    Station st;
    st.id = trim(f[0]);
    try {
      st.x = std::stod(f[1]);
      st.y = std::stod(f[2]);
    } catch (const std::exception&) {
      throw TraceError("stations row " + std::to_string(row) + ": bad coordinate");
    }
    if (!std::isfinite(st.x) || !std::isfinite(st.y))
      throw TraceError("stations row " + std::to_string(row) + ": non-finite coordinate");
    if (st.id.empty() || !seen.insert(st.id).second)
      throw TraceError("stations row " + std::to_string(row) + ": empty or duplicate station_id");
    set.stations.push_back(std::move(st));
  }
  if (set.stations.empty()) throw TraceError("stations file has no stations");
  return set;
}

ParsedTrace parse_trace(std::istream& stations_in, std::istream& records_in,
                        std::int64_t slot_length_seconds, const CalendarRule& rule) {
  if (slot_length_seconds <= 0) throw TraceError("slot_length must be positive");
  StationSet stations = parse_stations_csv(stations_in);
  const int M = stations.size();
  std::unordered_map<std::string, int> index;
  for (int m = 0; m < M; ++m) index[stations.stations[m].id] = m;

  std::string line;
  if (!std::getline(records_in, line)) throw TraceError("trace file is empty");
  auto header = split_csv_line(line);
  for (auto& h : header) h = trim(h);
  bool aggregated;
  if (header.size() >= 3 && header[0] == "timestamp" && header[1] == "station_id" &&
      header[2] == "load") {
    aggregated = true;
  } else if (header.size() >= 3 && header[0] == "start_time" && header[1] == "end_time" &&
             header[2] == "station_id") {
    aggregated = false;
  } else {
    throw TraceError("trace header must be timestamp,station_id,load or start_time,end_time,station_id");
  }

  ParsedTrace out;
  out.request_level = !aggregated;
  if (!aggregated) out.request_times.resize(M);

  struct Rec {
    std::int64_t ts;
    int station;
    double load;
  };
  std::vector<Rec> recs;
  std::int64_t prev_ts = std::numeric_limits<std::int64_t>::min();
  int row = 1;
  while (std::getline(records_in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() < 3) throw TraceError("records row " + std::to_string(row) + ": expected 3 columns");
    std::int64_t ts;
    std::string sid;
    double load = 1.0;
    try {
      if (aggregated) {
        ts = parse_iso_timestamp(trim(f[0]));
        sid = trim(f[1]);
        load = std::stod(f[2]);
      } else {
        ts = parse_iso_timestamp(trim(f[0]));
        std::int64_t end = parse_iso_timestamp(trim(f[1]));
        if (end < ts) throw TraceError("end before start");
        sid = trim(f[2]);
      }
    } catch (const TraceError& e) {
      throw TraceError("records row " + std::to_string(row) + ": " + e.what());
    } catch (const std::exception&) {
      throw TraceError("records row " + std::to_string(row) + ": bad value");
    }
    if (ts < prev_ts)
      throw TraceError("records row " + std::to_string(row) + ": timestamps are not monotone");
    prev_ts = ts;
    auto it = index.find(sid);
    if (it == index.end())
      throw TraceError("records row " + std::to_string(row) + ": unknown station_id '" + sid + "'");
    if (aggregated) {
      if (!std::isfinite(load) || load < 0.0)
        throw TraceError("records row " + std::to_string(row) + ": load must be nonnegative");
    } else {
      out.request_times[it->second].push_back(ts);
    }
    recs.push_back({ts, it->second, load});
  }
  if (recs.empty()) throw TraceError("trace contains no records");

  // Slot grid anchored at midnight of the first record's day, so that slot
  // indices map consistently onto periods of the day.
  std::int64_t day0 = (recs.front().ts / 86400) * 86400;
  auto slot_of = [&](std::int64_t ts) { return (ts - day0) / slot_length_seconds; };
  std::int64_t first_slot = slot_of(recs.front().ts);
  std::int64_t last_slot = slot_of(recs.back().ts);

  TraceSeries& series = out.series;
  series.slot_length = slot_length_seconds;
  series.frames.resize(static_cast<std::size_t>(last_slot - first_slot + 1));
  for (std::size_t i = 0; i < series.frames.size(); ++i) {
    auto& fr = series.frames[i];
    fr.slot_index = first_slot + static_cast<std::int64_t>(i);
    fr.timestamp = day0 + fr.slot_index * slot_length_seconds;
    fr.load.assign(M, 0.0);
  }
  for (const auto& r : recs) {
    auto& fr = series.frames[static_cast<std::size_t>(slot_of(r.ts) - first_slot)];
    fr.load[r.station] += aggregated ? r.load : 1.0;
  }
  series.labels.reserve(series.frames.size());
  for (const auto& fr : series.frames)
    series.labels.push_back(label_for(fr.timestamp, slot_length_seconds, rule));
  return out;
}

RepresentativeSet group_and_represent(const TraceSeries& series, RepresentativeMode mode) {
  if (series.frames.empty()) throw TraceError("cannot build representatives from an empty series");
  const int M = series.station_count();
  std::map<GroupKey, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < series.frames.size(); ++i) {
    const auto& lab = series.labels.at(i);
    groups[GroupKey{lab.day_class, lab.period_id}].push_back(i);
  }
  RepresentativeSet reps;
  reps.mode = mode;
  for (const auto& [key, members] : groups) {
    Vec v(M, 0.0);
    if (mode == RepresentativeMode::Average) {
      for (std::size_t i : members)
        for (int m = 0; m < M; ++m) v[m] += series.frames[i].load[m];
      for (int m = 0; m < M; ++m) v[m] /= static_cast<double>(members.size());
    } else {
      for (std::size_t i : members)
        for (int m = 0; m < M; ++m) v[m] = std::max(v[m], series.frames[i].load[m]);
    }
    reps.vectors.push_back(std::move(v));
    reps.group_keys.push_back(key);
  }
  return reps;
}

VariationSeries variation_ratio(const TraceSeries& series, int lag_slots) {
  if (lag_slots <= 0) throw TraceError("lag must be positive");
  if (static_cast<int>(series.frames.size()) <= lag_slots)
    throw TraceError("series shorter than the requested lag");
  VariationSeries out;
  const int M = series.station_count();
  for (std::size_t t = static_cast<std::size_t>(lag_slots); t < series.frames.size(); ++t) {
    const Vec& cur = series.frames[t].load;
    const Vec& ref = series.frames[t - lag_slots].load;
    double num = 0.0, den = 0.0;
    for (int m = 0; m < M; ++m) {
      num += std::abs(cur[m] - ref[m]);
      den += ref[m];
    }
    if (den <= 0.0) {
      out.skipped_slots.push_back(series.frames[t].slot_index);
    } else {
      out.points.push_back({series.frames[t].slot_index, num / den});
    }
  }
  return out;
}

const std::vector<double> kStatPercentiles = {99.999, 99.99, 99.9, 99, 90, 80, 70, 60, 50, 40};

namespace {

MetricStats stats_of(std::vector<double> values) {
  MetricStats s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  s.max = values.back();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std_dev = std::sqrt(sq / static_cast<double>(n));
  for (double p : kStatPercentiles) {
    double idx = p / 100.0 * static_cast<double>(n - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(idx));
    std::size_t hi = std::min(n - 1, lo + 1);
    double frac = idx - static_cast<double>(lo);
    s.percentiles[p] = values[lo] + frac * (values[hi] - values[lo]);
  }
  return s;
}

}  // namespace

TraceStats workload_stats(const TraceSeries& series,
                          const std::vector<std::vector<std::int64_t>>* request_times) {
  TraceStats stats;
  std::vector<double> loads;
  loads.reserve(series.frames.size() * static_cast<std::size_t>(series.station_count()));
  for (const auto& fr : series.frames)
    for (double v : fr.load) loads.push_back(v);
  stats.workload = stats_of(std::move(loads));

  if (request_times != nullptr) {
    std::vector<double> gaps;
    for (const auto& times : *request_times) {
      for (std::size_t i = 1; i < times.size(); ++i)
        gaps.push_back(static_cast<double>(times[i] - times[i - 1]));
    }
    stats.has_interarrival = !gaps.empty();
    stats.interarrival = stats_of(std::move(gaps));
  }
  return stats;
}

std::vector<WorkloadFrame> synth_bursts(const WorkloadFrame& base, const BurstSpec& spec) {
  const int M = static_cast<int>(base.load.size());
  if (spec.subset_min < 1 || spec.subset_min > spec.subset_max)
    throw TraceError("burst subset size range is invalid");
  if (spec.subset_max > M)
    throw TraceError("burst subset size exceeds the station count");
  if (spec.count <= 0) throw TraceError("burst count must be positive");
  for (double f : spec.scale_factors)
    if (!(f > 1.0)) throw TraceError("burst scale factors must exceed 1");
  if (spec.scale_factors.empty()) throw TraceError("burst scale factor set is empty");

  Rng rng(spec.seed);
  std::vector<WorkloadFrame> out;
  out.reserve(spec.count);
  for (int i = 0; i < spec.count; ++i) {
    WorkloadFrame fr = base;
    fr.slot_index = i;
    int size = spec.subset_min + static_cast<int>(rng.next_index(
                                     static_cast<std::size_t>(spec.subset_max - spec.subset_min + 1)));
    auto subset = rng.sample_without_replacement(static_cast<std::size_t>(M),
                                                 static_cast<std::size_t>(size));
    double factor = spec.scale_factors[rng.next_index(spec.scale_factors.size())];
    for (std::size_t s : subset) fr.load[s] *= factor;
    out.push_back(std::move(fr));
  }
  return out;
}

}  // namespace edgeplan
