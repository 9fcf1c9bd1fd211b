// Shared fixtures for placement/flow/evaluator tests.
#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "edgeplan/lp.hpp"
#include "edgeplan/placement.hpp"
#include "edgeplan/rng.hpp"
#include "edgeplan/topology.hpp"
#include "edgeplan/types.hpp"

namespace testhelp {

using namespace edgeplan;

struct Instance {
  StationSet stations;
  Neighborhood nbh;
  RepresentativeSet reps;
};

// Random planar instance with a connected-ish radius neighborhood and L
// strictly positive representative patterns.
inline Instance make_instance(Rng& rng, int M, int L, double spread = 100.0) {
  Instance inst;
  for (int m = 0; m < M; ++m)
    inst.stations.stations.push_back(
        {"s" + std::to_string(m), rng.next_double() * spread, rng.next_double() * spread});
  // Radius wide enough that most stations see a few neighbors.
  double delta = spread * (0.35 + 0.4 * rng.next_double());
  inst.nbh = build_neighborhoods(inst.stations, RadiusRule{delta});
  inst.reps.mode = RepresentativeMode::Average;
  for (int l = 0; l < L; ++l) {
    Vec w(M);
    for (int m = 0; m < M; ++m) w[m] = 0.5 + 9.5 * rng.next_double();
    inst.reps.vectors.push_back(std::move(w));
    inst.reps.group_keys.push_back({DayClass::Workday, l});
  }
  return inst;
}

// Best achievable max utilization for a fixed placement: the substituted LP
// at constant s. Returns +inf when some workload cannot be served at all.
inline double beta_of_placement(const std::vector<int>& s, const RepresentativeSet& reps,
                                const Neighborhood& nbh, double C) {
  using namespace edgeplan::lp;
  const int M = nbh.size();
  const int L = reps.count();
  LinearModel model;
  std::vector<std::vector<std::vector<int>>> u(L, std::vector<std::vector<int>>(M));
  for (int l = 0; l < L; ++l)
    for (int m = 0; m < M; ++m)
      for (int n : nbh.omega[m]) {
        (void)n;
        u[l][m].push_back(model.add_var("u"));
      }
  int kappa = model.add_var("kappa");
  for (int l = 0; l < L; ++l) {
    for (int m = 0; m < M; ++m) {
      Terms ts;
      for (int v : u[l][m]) ts.push_back({v, 1.0});
      ts.push_back({kappa, -reps.vectors[l][m]});
      model.add_constraint(std::move(ts), Rel::Eq, 0.0);
    }
    std::vector<Terms> cap(M);
    for (int m = 0; m < M; ++m)
      for (std::size_t p = 0; p < nbh.omega[m].size(); ++p)
        cap[nbh.omega[m][p]].push_back({u[l][m][p], 1.0});
    for (int n = 0; n < M; ++n)
      model.add_constraint(cap[n], Rel::LessEq, static_cast<double>(s[n]));
  }
  model.set_objective(Sense::Maximize, {{kappa, 1.0}});
  auto sol = solve_lp(model);
  if (!sol.optimal() || sol.values[kappa] <= 1e-12)
    return std::numeric_limits<double>::infinity();
  return 1.0 / (C * sol.values[kappa]);
}

}  // namespace testhelp
