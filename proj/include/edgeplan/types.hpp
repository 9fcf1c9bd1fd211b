#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace edgeplan {

using Vec = std::vector<double>;
using Matrix = std::vector<std::vector<double>>;  // dense row-major

struct Station {
  std::string id;
  double x = 0.0;  // planar coordinates, meters
  double y = 0.0;
};

struct StationSet {
  std::vector<Station> stations;

  int size() const { return static_cast<int>(stations.size()); }
};

enum class DayClass { Workday, Holiday };

struct CalendarLabel {
  DayClass day_class = DayClass::Workday;
  int period_id = 0;
};

struct WorkloadFrame {
  std::int64_t slot_index = 0;
  std::int64_t timestamp = 0;  // seconds since epoch, slot start
  Vec load;                    // length M, nonnegative
};

struct TraceSeries {
  std::vector<WorkloadFrame> frames;  // slot_index strictly increasing
  std::int64_t slot_length = 3600;    // seconds
  std::vector<CalendarLabel> labels;  // one per frame

  int station_count() const { return frames.empty() ? 0 : static_cast<int>(frames[0].load.size()); }
};

enum class RepresentativeMode { Average, ComponentMax };

struct GroupKey {
  DayClass day_class = DayClass::Workday;
  int period_id = 0;

  friend bool operator<(const GroupKey& a, const GroupKey& b) {
    if (a.day_class != b.day_class) return a.day_class < b.day_class;
    return a.period_id < b.period_id;
  }
  friend bool operator==(const GroupKey& a, const GroupKey& b) {
    return a.day_class == b.day_class && a.period_id == b.period_id;
  }
};

struct RepresentativeSet {
  std::vector<Vec> vectors;  // L vectors, each length M
  RepresentativeMode mode = RepresentativeMode::Average;
  std::vector<GroupKey> group_keys;

  int count() const { return static_cast<int>(vectors.size()); }
};

struct MetricStats {
  std::map<double, double> percentiles;  // percentile -> value
  double max = 0.0;
  double mean = 0.0;
  double std_dev = 0.0;
};

struct TraceStats {
  MetricStats workload;
  MetricStats interarrival;
  bool has_interarrival = false;
};

struct BurstSpec {
  int subset_min = 1;
  int subset_max = 1;                         // inclusive
  std::vector<double> scale_factors{1.2, 1.5, 1.8, 2.0};
  int count = 240;
  std::uint64_t seed = 0;
};

}  // namespace edgeplan
