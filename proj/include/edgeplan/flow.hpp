#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "edgeplan/placement.hpp"
#include "edgeplan/topology.hpp"
#include "edgeplan/types.hpp"

namespace edgeplan {

// Circulation graph for rounding a fractional placement: source feeds M left
// (demand) nodes, a bipartite layer routes over the neighborhoods to M right
// (station) nodes, right nodes drain to the sink, and a fixed [K,K] feedback
// arc closes the circulation. Node ids: 0 source, 1..M left, M+1..2M right,
// 2M+1 sink.
struct FlowGraph {
  struct Arc {
    int tail = 0;
    int head = 0;
    std::int64_t lower = 0;
    std::int64_t upper = 0;
    double cost = 0.0;
  };
  int station_count = 0;
  int K = 0;
  std::vector<Arc> arcs;
  std::vector<int> sink_arc_of_station;  // arc index of right_n -> sink

  int node_count() const { return 2 * station_count + 2; }
  int source() const { return 0; }
  int left(int m) const { return 1 + m; }
  int right(int n) const { return 1 + station_count + n; }
  int sink() const { return 2 * station_count + 1; }
};

struct IntegralFlow {
  std::vector<std::int64_t> flow;  // per arc
  double total_cost = 0.0;
};

class FlowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Floor/ceil bounds around the fractional point; sink arcs carry the
// rounding-loss cost floor(s)/s. The fractional point must conserve flow:
// row sums w_m*kappa, column sums s_n, total K.
FlowGraph build_circulation_graph(const Vec& s_tilde, const Matrix& u_prime, double kappa,
                                  const Vec& w, int K, const Neighborhood& nbh);

// Successive shortest paths over the standard lower-bound reduction.
// Deterministic for a fixed graph; throws FlowError with a cut witness when
// the bounds admit no circulation.
IntegralFlow min_cost_circulation(const FlowGraph& graph);

// Index of the representative whose transported load binds the placement
// (max column utilization); ties go to the lowest index.
int binding_pattern(const FractionalPlacement& frac);

IntegerPlacement round_mincost(const FractionalPlacement& frac, int pattern, int K,
                               const Neighborhood& nbh);
IntegerPlacement round_mincost(const FractionalPlacement& frac, int K, const Neighborhood& nbh);

// DIMACS min-cost-flow text format, for cross-validation.
void write_dimacs(const FlowGraph& graph, std::ostream& os);

}  // namespace edgeplan
