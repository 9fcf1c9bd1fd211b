#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "edgeplan/placement.hpp"
#include "edgeplan/scheduling.hpp"
#include "edgeplan/topology.hpp"
#include "edgeplan/types.hpp"

namespace edgeplan {

struct SimulationReport {
  struct FrameResult {
    std::int64_t slot = 0;
    double total = 0.0;
    double rejected = 0.0;
    double rate = 0.0;  // rejected / total, 0 for empty frames
  };
  std::vector<FrameResult> per_frame;
  double mean_rate = 0.0;
  double max_rate = 0.0;
  double total_workload = 0.0;
  double total_rejected = 0.0;
  std::optional<ScheduleCost> energy;
};

struct PolicySpec {
  enum class Kind { Random, Clustering, Uniform, TwithoutLB, TwithLB, RoRp };
  Kind kind = Kind::Random;
  int k = 0;               // cluster count (Clustering, TwithoutLB)
  double zone_size = 0.0;  // zone edge length in meters (Uniform)
  std::uint64_t seed = 0;  // Random draws, RR rounding
  RoundingScheme scheme = RoundingScheme::SRPF;  // RoRp rounding
};

const char* to_string(PolicySpec::Kind kind);

// Session over a fixed neighborhood and capacity: the rejection LP keeps its
// shape across frames and placements, so every call after the first is a
// warm dual re-solve.
class RejectionEvaluator {
 public:
  RejectionEvaluator(Neighborhood nbh, double C);
  ~RejectionEvaluator();
  RejectionEvaluator(RejectionEvaluator&&) noexcept;
  RejectionEvaluator& operator=(RejectionEvaluator&&) noexcept;

  double rejected(const Vec& w, const Vec& s_active);
  std::pair<double, Matrix> rejected_with_routing(const Vec& w, const Vec& s_active);

  const Neighborhood& neighborhood() const;
  double capacity() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Minimum rejected workload for one frame, with a witnessing routing.
std::pair<double, Matrix> min_rejection(const Vec& w, const Vec& s_active, double C,
                                        const Neighborhood& nbh);

// The six placement policies of the comparison harness. avg_workload feeds
// the traffic-aware baselines; reps feeds the robust pipeline.
IntegerPlacement baseline_place(const PolicySpec& policy, const StationSet& stations,
                                const Vec& avg_workload, const RepresentativeSet& reps,
                                const Neighborhood& nbh, const PlacementParams& params);

SimulationReport evaluate_placement(const IntegerPlacement& placement, const TraceSeries& trace,
                                    double C, const Neighborhood& nbh);

// Frames align to plan slots by slot-of-day; trace slots must tile the day
// with exactly one plan slot each.
SimulationReport evaluate_schedule(const SchedulePlan& plan, const TraceSeries& trace, double C,
                                   const Neighborhood& nbh, const CostParams& costs);

}  // namespace edgeplan
