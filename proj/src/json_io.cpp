#include "edgeplan/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace edgeplan {

namespace {

json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double from_finite_or_null(const json& j, double fallback) {
  if (j.is_null()) return fallback;
  return j.get<double>();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

json neighborhood_to_json(const Neighborhood& nbh) {
  json rule;
  if (const auto* r = std::get_if<RadiusRule>(&nbh.rule)) {
    rule = {{"kind", "radius"}, {"delta", r->delta}};
  } else if (const auto* k = std::get_if<KNearestRule>(&nbh.rule)) {
    rule = {{"kind", "k_nearest"}, {"k", k->k}};
  } else {
    rule = {{"kind", "explicit"}};
  }
  json omega = json::array();
  for (const auto& set : nbh.omega) omega.push_back(set);
  return {{"rule", rule}, {"omega", omega}};
}

Neighborhood neighborhood_from_json(const json& j) {
  Neighborhood nbh;
  const auto& rule = j.at("rule");
  std::string kind = rule.at("kind").get<std::string>();
  if (kind == "radius") {
    nbh.rule = RadiusRule{rule.at("delta").get<double>()};
  } else if (kind == "k_nearest") {
    nbh.rule = KNearestRule{rule.at("k").get<int>()};
  } else {
    nbh.rule = ExplicitRule{};
  }
  for (const auto& set : j.at("omega")) nbh.omega.push_back(set.get<std::vector<int>>());
  nbh.validate();
  return nbh;
}

json representatives_to_json(const RepresentativeSet& reps) {
  json groups = json::array();
  for (int l = 0; l < reps.count(); ++l) {
    groups.push_back({{"day_class", reps.group_keys[l].day_class == DayClass::Holiday
                                        ? "holiday"
                                        : "workday"},
                      {"period_id", reps.group_keys[l].period_id},
                      {"vector", reps.vectors[l]}});
  }
  return {{"mode", reps.mode == RepresentativeMode::Average ? "average" : "component_max"},
          {"groups", groups}};
}

RepresentativeSet representatives_from_json(const json& j) {
  RepresentativeSet reps;
  reps.mode = j.at("mode").get<std::string>() == "component_max" ? RepresentativeMode::ComponentMax
                                                                 : RepresentativeMode::Average;
  for (const auto& g : j.at("groups")) {
    GroupKey key;
    key.day_class =
        g.at("day_class").get<std::string>() == "holiday" ? DayClass::Holiday : DayClass::Workday;
    key.period_id = g.at("period_id").get<int>();
    reps.group_keys.push_back(key);
    reps.vectors.push_back(g.at("vector").get<Vec>());
  }
  return reps;
}

json placement_to_json(const IntegerPlacement& placement, const StationSet& stations,
                       const PlacementParams& params, double beta_star, double eta_star) {
  json servers = json::array();
  for (int m = 0; m < stations.size(); ++m) {
    servers.push_back({{"station_id", stations.stations[m].id}, {"count", placement.s[m]}});
  }
  return {{"K", params.K},
          {"C", params.C},
          {"beta_star", finite_or_null(beta_star)},
          {"eta_star", finite_or_null(eta_star)},
          {"scheme", placement.provenance},
          {"servers", servers}};
}

IntegerPlacement placement_from_json(const json& j, const StationSet& stations) {
  IntegerPlacement out;
  out.s.assign(stations.size(), 0);
  out.provenance = j.value("scheme", std::string("unknown"));
  std::map<std::string, int> index;
  for (int m = 0; m < stations.size(); ++m) index[stations.stations[m].id] = m;
  for (const auto& entry : j.at("servers")) {
    auto id = entry.at("station_id").get<std::string>();
    auto it = index.find(id);
    if (it == index.end())
      throw std::runtime_error("placement references unknown station '" + id + "'");
    out.s[it->second] = entry.at("count").get<int>();
  }
  return out;
}

json schedule_to_json(const SchedulePlan& plan) {
  json slots = json::array();
  for (const auto& sp : plan.slots) {
    slots.push_back({{"t", sp.t},
                     {"K_star", sp.k_star},
                     {"beta_star", finite_or_null(sp.beta_star)},
                     {"eta_star", finite_or_null(sp.eta_star)},
                     {"servers", sp.servers}});
  }
  return {{"slots", slots},
          {"initial_state", plan.initial_state},
          {"cost",
           {{"running", plan.cost.running},
            {"switching", plan.cost.switching},
            {"total", plan.cost.total}}}};
}

SchedulePlan schedule_from_json(const json& j) {
  SchedulePlan plan;
  for (const auto& s : j.at("slots")) {
    SlotPlan sp;
    sp.t = s.at("t").get<int>();
    sp.k_star = s.at("K_star").get<int>();
    sp.beta_star = from_finite_or_null(s.at("beta_star"), 0.0);
    sp.eta_star = from_finite_or_null(s.at("eta_star"), std::numeric_limits<double>::infinity());
    sp.servers = s.at("servers").get<std::vector<int>>();
    plan.slots.push_back(std::move(sp));
  }
  plan.initial_state = j.at("initial_state").get<std::vector<int>>();
  const auto& c = j.at("cost");
  plan.cost.running = c.at("running").get<double>();
  plan.cost.switching = c.at("switching").get<double>();
  plan.cost.total = c.at("total").get<double>();
  return plan;
}

json report_to_json(const SimulationReport& report) {
  json out = {{"mean_rate", report.mean_rate},
              {"max_rate", report.max_rate},
              {"total_workload", report.total_workload},
              {"total_rejected", report.total_rejected},
              {"frames", report.per_frame.size()}};
  if (report.energy) {
    out["energy"] = {{"running", report.energy->running},
                     {"switching", report.energy->switching},
                     {"total", report.energy->total}};
  }
  return out;
}

void write_report_csv(const SimulationReport& report, std::ostream& os,
                      const std::string& provenance_line) {
  if (!provenance_line.empty()) os << "# " << provenance_line << "\n";
  os << "slot,total,rejected,rate\n";
  for (const auto& fr : report.per_frame) {
    os << fr.slot << "," << fmt(fr.total) << "," << fmt(fr.rejected) << "," << fmt(fr.rate)
       << "\n";
  }
}

json stats_to_json(const TraceStats& stats) {
  auto block = [](const MetricStats& m) {
    json p = json::object();
    for (const auto& [pct, value] : m.percentiles) {
      char key[16];
      std::snprintf(key, sizeof(key), "%g", pct);
      p[key] = value;
    }
    return json{{"max", m.max}, {"mean", m.mean}, {"std", m.std_dev}, {"percentiles", p}};
  };
  json out = {{"workload", block(stats.workload)}};
  if (stats.has_interarrival) {
    out["interarrival"] = block(stats.interarrival);
  } else {
    out["interarrival"] = nullptr;
  }
  return out;
}

}  // namespace edgeplan
