#include "edgeplan/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "edgeplan/evaluator.hpp"
#include "edgeplan/flow.hpp"
#include "edgeplan/json_io.hpp"
#include "edgeplan/lp.hpp"
#include "edgeplan/placement.hpp"
#include "edgeplan/scheduling.hpp"
#include "edgeplan/trace.hpp"
#include "edgeplan/version.hpp"

namespace edgeplan::cli {

namespace fs = std::filesystem;

namespace {

bool verbose_logging() {
  const char* env = std::getenv("EDGEPLAN_LOG");
  return env != nullptr && std::string(env) != "quiet" && std::string(env) != "error";
}

void log(const std::string& msg) {
  if (verbose_logging()) std::cerr << "[edgeplan] " << msg << "\n";
}

json default_config() {
  return {
      {"stations", ""},
      {"trace", ""},
      {"holidays", ""},
      {"output_dir", "."},
      {"slot_minutes", 60},
      {"periods_per_day", 6},
      {"representative_mode", "average"},
      {"omega", {{"kind", "radius"}, {"delta", 1000.0}}},
      {"K", 10},
      {"C", 1.0},
      {"costs", {{"E_r", 1.0}, {"E_w", 0.0}, {"E_s", 1.0}}},
      {"seed", 42},
      {"epsilon", 1e-3},
      {"scheme", "srpf"},
      {"policy", "ro_rp"},
      {"policy_k", 8},
      {"zone_size", 0.0},
      {"burst",
       {{"subset_min", 0}, {"subset_max", 0}, {"factors", {1.2, 1.5, 1.8, 2.0}}, {"count", 240}}},
      {"lag_slots", 168},
      {"day_class", "workday"},
  };
}

struct Ctx {
  json cfg;
  std::string hash;

  fs::path out_dir() const { return fs::path(cfg.at("output_dir").get<std::string>()); }
  std::string provenance() const {
    return "config_hash=" + hash + " version=" + std::string(kVersion);
  }

  std::int64_t slot_seconds() const { return cfg.at("slot_minutes").get<std::int64_t>() * 60; }

  CalendarRule calendar() const {
    CalendarRule rule;
    rule.periods_per_day = cfg.at("periods_per_day").get<int>();
    auto path = cfg.at("holidays").get<std::string>();
    if (!path.empty()) {
      std::ifstream in(path);
      if (!in) throw std::runtime_error("cannot open holiday file: " + path);
      std::string line;
      while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) rule.holiday_dates.insert(line);
      }
    }
    return rule;
  }

  StationSet stations() const {
    auto path = cfg.at("stations").get<std::string>();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open stations file: " + path);
    return parse_stations_csv(in);
  }

  ParsedTrace trace() const {
    auto spath = cfg.at("stations").get<std::string>();
    auto tpath = cfg.at("trace").get<std::string>();
    std::ifstream sin(spath);
    if (!sin) throw std::runtime_error("cannot open stations file: " + spath);
    std::ifstream tin(tpath);
    if (!tin) throw std::runtime_error("cannot open trace file: " + tpath);
    return parse_trace(sin, tin, slot_seconds(), calendar());
  }

  Neighborhood omega(const StationSet& st) const {
    const auto& o = cfg.at("omega");
    auto kind = o.at("kind").get<std::string>();
    if (kind == "radius") return build_neighborhoods(st, RadiusRule{o.at("delta").get<double>()});
    if (kind == "k_nearest") return build_neighborhoods(st, KNearestRule{o.at("k").get<int>()});
    if (kind == "file") {
      auto path = o.at("path").get<std::string>();
      std::ifstream in(path);
      if (!in) throw std::runtime_error("cannot open neighborhood file: " + path);
      json j;
      in >> j;
      return neighborhood_from_json(j);
    }
    throw std::runtime_error("unknown omega rule: " + kind);
  }

  PlacementParams params() const {
    return PlacementParams{cfg.at("K").get<int>(), cfg.at("C").get<double>()};
  }

  CostParams costs() const {
    const auto& c = cfg.at("costs");
    return CostParams{c.at("E_r").get<double>(), c.at("E_w").get<double>(),
                      c.at("E_s").get<double>(), cfg.at("C").get<double>()};
  }

  RepresentativeMode rep_mode() const {
    return cfg.at("representative_mode").get<std::string>() == "component_max"
               ? RepresentativeMode::ComponentMax
               : RepresentativeMode::Average;
  }

  DayClass day_class() const {
    return cfg.at("day_class").get<std::string>() == "holiday" ? DayClass::Holiday
                                                               : DayClass::Workday;
  }

  void write_json(const std::string& name, json j) const {
    j["config_hash"] = hash;
    j["version"] = std::string(kVersion);
    fs::create_directories(out_dir());
    auto path = out_dir() / name;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << "\n";
    log("wrote " + path.string());
  }

  std::ofstream open_csv(const std::string& name) const {
    fs::create_directories(out_dir());
    auto path = out_dir() / name;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    log("wrote " + path.string());
    return out;
  }
};

RoundingScheme scheme_from_string(const std::string& s) {
  if (s == "srpf") return RoundingScheme::SRPF;
  if (s == "rr") return RoundingScheme::RR;
  if (s == "lrpf") return RoundingScheme::LRPF;
  if (s == "ldf") return RoundingScheme::LDF;
  if (s == "lsf") return RoundingScheme::LSF;
  throw std::runtime_error("unknown rounding scheme: " + s);
}

PolicySpec::Kind policy_from_string(const std::string& s) {
  if (s == "random") return PolicySpec::Kind::Random;
  if (s == "clustering") return PolicySpec::Kind::Clustering;
  if (s == "uniform") return PolicySpec::Kind::Uniform;
  if (s == "twithoutlb") return PolicySpec::Kind::TwithoutLB;
  if (s == "twithlb") return PolicySpec::Kind::TwithLB;
  if (s == "ro_rp") return PolicySpec::Kind::RoRp;
  throw std::runtime_error("unknown policy: " + s);
}

Vec average_workload(const TraceSeries& series) {
  const int M = series.station_count();
  Vec avg(M, 0.0);
  for (const auto& fr : series.frames)
    for (int m = 0; m < M; ++m) avg[m] += fr.load[m];
  for (double& v : avg) v /= static_cast<double>(series.frames.size());
  return avg;
}

double auto_zone_size(const StationSet& st) {
  double minx = st.stations[0].x, maxx = minx, miny = st.stations[0].y, maxy = miny;
  for (const auto& s : st.stations) {
    minx = std::min(minx, s.x);
    maxx = std::max(maxx, s.x);
    miny = std::min(miny, s.y);
    maxy = std::max(maxy, s.y);
  }
  return std::max(1.0, std::max(maxx - minx, maxy - miny) / 4.0);
}

PolicySpec policy_spec(const Ctx& ctx, PolicySpec::Kind kind, const StationSet& st) {
  PolicySpec spec;
  spec.kind = kind;
  spec.k = std::min(ctx.cfg.at("policy_k").get<int>(), st.size());
  spec.seed = ctx.cfg.at("seed").get<std::uint64_t>();
  spec.scheme = scheme_from_string(ctx.cfg.at("scheme").get<std::string>() == "mincost"
                                       ? "srpf"
                                       : ctx.cfg.at("scheme").get<std::string>());
  double zone = ctx.cfg.at("zone_size").get<double>();
  spec.zone_size = zone > 0 ? zone : auto_zone_size(st);
  return spec;
}

BurstSpec burst_spec(const Ctx& ctx, int M) {
  const auto& b = ctx.cfg.at("burst");
  BurstSpec spec;
  spec.subset_min = b.at("subset_min").get<int>();
  spec.subset_max = b.at("subset_max").get<int>();
  if (spec.subset_min <= 0 || spec.subset_max <= 0) {
    // Scale the trace-analysis burst footprint to this station count.
    spec.subset_min = std::max(1, static_cast<int>(std::lround(M * 100.0 / 3042.0)));
    spec.subset_max = std::max(spec.subset_min, static_cast<int>(std::lround(M * 200.0 / 3042.0)));
  }
  spec.scale_factors = b.at("factors").get<std::vector<double>>();
  spec.count = b.at("count").get<int>();
  spec.seed = ctx.cfg.at("seed").get<std::uint64_t>();
  return spec;
}

std::string fmtg(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_analyze(const Ctx& ctx) {
  ParsedTrace parsed = ctx.trace();
  TraceStats stats =
      workload_stats(parsed.series, parsed.request_level ? &parsed.request_times : nullptr);
  {
    auto out = ctx.open_csv("stats.csv");
    out << "# " << ctx.provenance() << "\n";
    out << "metric,stat,value\n";
    auto block = [&](const char* name, const MetricStats& m) {
      out << name << ",max," << fmtg(m.max) << "\n";
      out << name << ",mean," << fmtg(m.mean) << "\n";
      out << name << ",std," << fmtg(m.std_dev) << "\n";
      for (auto it = m.percentiles.rbegin(); it != m.percentiles.rend(); ++it)
        out << name << ",p" << fmtg(it->first) << "," << fmtg(it->second) << "\n";
    };
    block("workload", stats.workload);
    if (stats.has_interarrival) block("interarrival", stats.interarrival);
  }
  {
    int lag = ctx.cfg.at("lag_slots").get<int>();
    lag = std::min<int>(lag, static_cast<int>(parsed.series.frames.size()) - 1);
    if (lag >= 1) {
      VariationSeries vt = variation_ratio(parsed.series, lag);
      auto out = ctx.open_csv("vt.csv");
      out << "# " << ctx.provenance() << " lag_slots=" << lag << "\n";
      out << "slot,ratio\n";
      for (const auto& p : vt.points) out << p.slot_index << "," << fmtg(p.ratio) << "\n";
      if (!vt.skipped_slots.empty()) {
        out << "# skipped_zero_denominator=";
        for (std::size_t i = 0; i < vt.skipped_slots.size(); ++i)
          out << (i ? ";" : "") << vt.skipped_slots[i];
        out << "\n";
      }
    }
  }
  ctx.write_json("stats.json", stats_to_json(stats));
  return 0;
}

int cmd_represent(const Ctx& ctx) {
  ParsedTrace parsed = ctx.trace();
  RepresentativeSet reps = group_and_represent(parsed.series, ctx.rep_mode());
  ctx.write_json("representatives.json", representatives_to_json(reps));
  return 0;
}

int cmd_place(const Ctx& ctx, const std::string& policy_name, const std::string& scheme_name) {
  StationSet st = ctx.stations();
  ParsedTrace parsed = ctx.trace();
  Neighborhood nbh = ctx.omega(st);
  PlacementParams params = ctx.params();
  RepresentativeSet reps = group_and_represent(parsed.series, ctx.rep_mode());
  Vec avg = average_workload(parsed.series);

  PolicySpec::Kind kind = policy_from_string(policy_name);
  IntegerPlacement placement;
  double beta_star = std::numeric_limits<double>::quiet_NaN();
  double eta_star = std::numeric_limits<double>::quiet_NaN();
  if (kind == PolicySpec::Kind::RoRp) {
    RoRpSolver solver(reps, nbh, params.C);
    FractionalPlacement ro = solver.solve_ro(params.K);
    FractionalPlacement rp = solver.solve_rp(params.K, ro.beta_star);
    beta_star = ro.beta_star;
    eta_star = rp.eta_star;
    if (scheme_name == "mincost") {
      placement = round_mincost(rp, params.K, nbh);
    } else {
      placement = round_heuristic(rp, scheme_from_string(scheme_name), nbh, params.K,
                                  ctx.cfg.at("seed").get<std::uint64_t>());
    }
  } else {
    placement = baseline_place(policy_spec(ctx, kind, st), st, avg, reps, nbh, params);
  }
  ctx.write_json("placement.json", placement_to_json(placement, st, params, beta_star, eta_star));
  return 0;
}

int cmd_schedule(const Ctx& ctx, const std::string& placement_path, bool no_switching_cost) {
  StationSet st = ctx.stations();
  ParsedTrace parsed = ctx.trace();
  Neighborhood nbh = ctx.omega(st);
  CostParams costs = ctx.costs();
  if (no_switching_cost) costs.E_s = 0.0;

  std::string ppath = placement_path.empty()
                          ? (ctx.out_dir() / "placement.json").string()
                          : placement_path;
  std::ifstream pin(ppath);
  if (!pin) throw std::runtime_error("cannot open placement file: " + ppath);
  json pj;
  pin >> pj;
  IntegerPlacement deployed = placement_from_json(pj, st);
  Vec s_cap(deployed.s.begin(), deployed.s.end());

  if (86400 % ctx.slot_seconds() != 0)
    throw std::runtime_error("slot_minutes must divide a day for scheduling");
  int N = static_cast<int>(86400 / ctx.slot_seconds());
  DayHistory hist = day_history(parsed.series, N, ctx.day_class());

  double epsilon = ctx.cfg.at("epsilon").get<double>();
  std::vector<DaySlotInput> inputs(N);
  for (int t = 0; t < N; ++t) {
    auto& in = inputs[t];
    in.w_bar = hist.w_bar[t].empty() ? Vec(st.size(), 0.0) : hist.w_bar[t];
    if (hist.frames[t].empty()) {
      in.k_star = 0;
      in.beta_star = 0.0;
      in.eta_star = std::numeric_limits<double>::infinity();
      continue;
    }
    KStarResult ks = find_k_star(t, hist.frames[t], nbh, costs.C, s_cap, epsilon);
    if (!ks.satisfied)
      log("slot " + std::to_string(t) + ": no K meets epsilon; using the full deployment");
    in.k_star = ks.k_star;
    SlotFractional sf = solve_slot_fractional(in.w_bar, nbh, in.k_star, costs.C, s_cap);
    in.beta_star = sf.beta_star;
    in.eta_star = sf.eta_star;
    log("slot " + std::to_string(t) + ": K*=" + std::to_string(in.k_star));
  }

  // First-ever day: seed the switching baseline from the first slot's own
  // fractional optimum, rounded.
  std::vector<int> initial(st.size(), 0);
  if (inputs[0].k_star > 0) {
    SlotFractional sf0 = solve_slot_fractional(inputs[0].w_bar, nbh, inputs[0].k_star, costs.C, s_cap);
    IntegerPlacement r0 = round_up_to_target(sf0.s, RoundingScheme::SRPF, nbh, inputs[0].k_star, 0);
    initial = r0.s;
  }

  SchedulePlan plan = solve_day_schedule(inputs, nbh, s_cap, costs, initial);
  ctx.write_json("schedule.json", schedule_to_json(plan));
  return 0;
}

int cmd_simulate(const Ctx& ctx, const std::string& placement_path,
                 const std::string& schedule_path) {
  StationSet st = ctx.stations();
  ParsedTrace parsed = ctx.trace();
  Neighborhood nbh = ctx.omega(st);
  double C = ctx.cfg.at("C").get<double>();

  SimulationReport report;
  if (!schedule_path.empty()) {
    std::ifstream in(schedule_path);
    if (!in) throw std::runtime_error("cannot open schedule file: " + schedule_path);
    json j;
    in >> j;
    SchedulePlan plan = schedule_from_json(j);
    report = evaluate_schedule(plan, parsed.series, C, nbh, ctx.costs());
  } else {
    std::string ppath = placement_path.empty()
                            ? (ctx.out_dir() / "placement.json").string()
                            : placement_path;
    std::ifstream in(ppath);
    if (!in) throw std::runtime_error("cannot open placement file: " + ppath);
    json j;
    in >> j;
    IntegerPlacement placement = placement_from_json(j, st);
    report = evaluate_placement(placement, parsed.series, C, nbh);
  }
  {
    auto out = ctx.open_csv("report.csv");
    write_report_csv(report, out, ctx.provenance());
  }
  ctx.write_json("report.json", report_to_json(report));
  return 0;
}

int cmd_synth(const Ctx& ctx, int base_index) {
  StationSet st = ctx.stations();
  ParsedTrace parsed = ctx.trace();
  const auto& frames = parsed.series.frames;

  std::size_t base = 0;
  if (base_index >= 0) {
    if (base_index >= static_cast<int>(frames.size()))
      throw std::runtime_error("base frame index out of range");
    base = static_cast<std::size_t>(base_index);
  } else {
    double best = -1.0;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      double total = 0.0;
      for (double v : frames[i].load) total += v;
      if (total > best) {
        best = total;
        base = i;
      }
    }
  }
  BurstSpec spec = burst_spec(ctx, st.size());
  auto bursts = synth_bursts(frames[base], spec);

  auto out = ctx.open_csv("synthetic.csv");
  out << "timestamp,station_id,load\n";
  std::int64_t t0 = frames[base].timestamp;
  for (std::size_t i = 0; i < bursts.size(); ++i) {
    std::int64_t ts = t0 + static_cast<std::int64_t>(i) * parsed.series.slot_length;
    std::string stamp = civil_date(ts);
    std::int64_t sec = ((ts % 86400) + 86400) % 86400;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "T%02d:%02d:%02d", static_cast<int>(sec / 3600),
                  static_cast<int>((sec / 60) % 60), static_cast<int>(sec % 60));
    for (int m = 0; m < st.size(); ++m) {
      if (bursts[i].load[m] <= 0) continue;
      out << stamp << buf << "," << st.stations[m].id << "," << fmtg(bursts[i].load[m]) << "\n";
    }
  }
  return 0;
}

int cmd_compare(const Ctx& ctx, bool bursty) {
  StationSet st = ctx.stations();
  ParsedTrace parsed = ctx.trace();
  Neighborhood nbh = ctx.omega(st);
  PlacementParams params = ctx.params();
  RepresentativeSet reps = group_and_represent(parsed.series, ctx.rep_mode());
  Vec avg = average_workload(parsed.series);

  TraceSeries eval_trace = parsed.series;
  if (bursty) {
    std::size_t base = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < parsed.series.frames.size(); ++i) {
      double total = 0.0;
      for (double v : parsed.series.frames[i].load) total += v;
      if (total > best) {
        best = total;
        base = i;
      }
    }
    auto bursts = synth_bursts(parsed.series.frames[base], burst_spec(ctx, st.size()));
    eval_trace.frames = std::move(bursts);
    eval_trace.labels.assign(eval_trace.frames.size(), CalendarLabel{});
  }

  const PolicySpec::Kind kinds[] = {PolicySpec::Kind::Random,     PolicySpec::Kind::Clustering,
                                    PolicySpec::Kind::Uniform,    PolicySpec::Kind::TwithoutLB,
                                    PolicySpec::Kind::TwithLB,    PolicySpec::Kind::RoRp};
  json manifest_policies = json::array();
  for (auto kind : kinds) {
    log(std::string("placing policy ") + to_string(kind));
    IntegerPlacement placement =
        baseline_place(policy_spec(ctx, kind, st), st, avg, reps, nbh, params);
    SimulationReport report = evaluate_placement(placement, eval_trace, params.C, nbh);
    std::string csv_name = std::string("report_") + to_string(kind) + ".csv";
    {
      auto out = ctx.open_csv(csv_name);
      write_report_csv(report, out, ctx.provenance() + " policy=" + to_string(kind));
    }
    manifest_policies.push_back({{"policy", to_string(kind)},
                                 {"report_csv", csv_name},
                                 {"mean_rate", report.mean_rate},
                                 {"max_rate", report.max_rate},
                                 {"total_rejected", report.total_rejected}});
  }
  ctx.write_json("manifest.json", {{"policies", manifest_policies}, {"bursty", bursty}});
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"edgeplan: workload-robust edge server placement and scheduling toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file");

  // Flags override config keys.
  std::string stations, trace, holidays, output_dir, scheme, policy, rep_mode, day_class;
  int K = -1, policy_k = -1, lag_slots = -1;
  double C = -1, epsilon = -1, zone_size = -1;
  std::int64_t seed = -1;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--stations", stations, "stations CSV (station_id,x,y)");
    sub->add_option("--trace", trace, "trace CSV (aggregated or request-level)");
    sub->add_option("--holidays", holidays, "holiday dates file, one ISO date per line");
    sub->add_option("--output-dir", output_dir, "output directory");
    sub->add_option("--K", K, "total servers");
    sub->add_option("--C", C, "capacity of one server");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--epsilon", epsilon, "rejection threshold for K*");
    sub->add_option("--policy-k", policy_k, "cluster count for baseline policies");
    sub->add_option("--zone-size", zone_size, "zone edge length for the uniform policy");
    sub->add_option("--representative-mode", rep_mode, "average|component_max");
    sub->add_option("--day-class", day_class, "workday|holiday (schedule)");
  };

  auto* analyze = app.add_subcommand("analyze", "trace statistics and variation-ratio CSVs");
  add_common(analyze);
  analyze->add_option("--lag-slots", lag_slots, "lag for the variation ratio");

  auto* represent = app.add_subcommand("represent", "group frames and emit representatives");
  add_common(represent);

  auto* place = app.add_subcommand("place", "compute a server placement");
  add_common(place);
  place->add_option("--scheme", scheme, "srpf|rr|lrpf|ldf|lsf|mincost");
  place->add_option("--policy", policy, "ro_rp|random|clustering|uniform|twithoutlb|twithlb");

  auto* schedule = app.add_subcommand("schedule", "day-ahead server on-off schedule");
  add_common(schedule);
  std::string placement_path;
  bool no_switching_cost = false;
  schedule->add_option("--placement", placement_path, "deployed placement JSON");
  schedule->add_flag("--no-switching-cost", no_switching_cost,
                     "ignore switching cost (per-slot optima)");

  auto* simulate = app.add_subcommand("simulate", "replay a trace against a placement/schedule");
  add_common(simulate);
  std::string sim_placement, sim_schedule;
  simulate->add_option("--placement", sim_placement, "placement JSON to evaluate");
  simulate->add_option("--schedule", sim_schedule, "schedule JSON to evaluate");

  auto* synth = app.add_subcommand("synth", "generate bursty synthetic frames");
  add_common(synth);
  int base_index = -1;
  synth->add_option("--base-index", base_index, "base frame index (default: peak frame)");

  auto* compare = app.add_subcommand("compare", "run all six placement policies");
  add_common(compare);
  bool bursty = false;
  compare->add_flag("--bursty", bursty, "evaluate on synthetic bursts of the peak frame");

  std::vector<char*> argv;
  std::vector<std::string> owned = args;
  std::string prog = "edgeplan";
  argv.push_back(prog.data());
  for (auto& a : owned) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    Ctx ctx;
    ctx.cfg = default_config();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::runtime_error("cannot open config file: " + config_path);
      json user;
      in >> user;
      ctx.cfg.merge_patch(user);
    }
    if (!stations.empty()) ctx.cfg["stations"] = stations;
    if (!trace.empty()) ctx.cfg["trace"] = trace;
    if (!holidays.empty()) ctx.cfg["holidays"] = holidays;
    if (!output_dir.empty()) ctx.cfg["output_dir"] = output_dir;
    if (K >= 0) ctx.cfg["K"] = K;
    if (C >= 0) ctx.cfg["C"] = C;
    if (seed >= 0) ctx.cfg["seed"] = seed;
    if (epsilon >= 0) ctx.cfg["epsilon"] = epsilon;
    if (policy_k >= 0) ctx.cfg["policy_k"] = policy_k;
    if (zone_size >= 0) ctx.cfg["zone_size"] = zone_size;
    if (!rep_mode.empty()) ctx.cfg["representative_mode"] = rep_mode;
    if (!day_class.empty()) ctx.cfg["day_class"] = day_class;
    if (!scheme.empty()) ctx.cfg["scheme"] = scheme;
    if (!policy.empty()) ctx.cfg["policy"] = policy;
    if (lag_slots >= 0) ctx.cfg["lag_slots"] = lag_slots;
    ctx.hash = hex64(fnv1a64(ctx.cfg.dump()));

    if (analyze->parsed()) return cmd_analyze(ctx);
    if (represent->parsed()) return cmd_represent(ctx);
    if (place->parsed())
      return cmd_place(ctx, ctx.cfg.at("policy").get<std::string>(),
                       ctx.cfg.at("scheme").get<std::string>());
    if (schedule->parsed()) return cmd_schedule(ctx, placement_path, no_switching_cost);
    if (simulate->parsed()) return cmd_simulate(ctx, sim_placement, sim_schedule);
    if (synth->parsed()) return cmd_synth(ctx, base_index);
    if (compare->parsed()) return cmd_compare(ctx, bursty);
    std::cerr << "error: no subcommand given\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace edgeplan::cli
