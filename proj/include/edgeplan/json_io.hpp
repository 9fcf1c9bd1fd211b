#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "edgeplan/evaluator.hpp"
#include "edgeplan/placement.hpp"
#include "edgeplan/scheduling.hpp"
#include "edgeplan/topology.hpp"
#include "edgeplan/types.hpp"

namespace edgeplan {

using nlohmann::json;

json neighborhood_to_json(const Neighborhood& nbh);
Neighborhood neighborhood_from_json(const json& j);

json representatives_to_json(const RepresentativeSet& reps);
RepresentativeSet representatives_from_json(const json& j);

json placement_to_json(const IntegerPlacement& placement, const StationSet& stations,
                       const PlacementParams& params, double beta_star, double eta_star);
// Station ids must match; returns the placement aligned to the station order.
IntegerPlacement placement_from_json(const json& j, const StationSet& stations);

json schedule_to_json(const SchedulePlan& plan);
SchedulePlan schedule_from_json(const json& j);

json report_to_json(const SimulationReport& report);
void write_report_csv(const SimulationReport& report, std::ostream& os,
                      const std::string& provenance_line);

json stats_to_json(const TraceStats& stats);

}  // namespace edgeplan
