#include "edgeplan/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace edgeplan {

namespace {

constexpr double kConsTol = 1e-6;

// Snap near-integral fractional values so their floor/ceil window is a point.
std::pair<std::int64_t, std::int64_t> bounds_around(double v) {
  double r = std::round(v);
  if (std::abs(v - r) < 1e-9) {
    auto iv = static_cast<std::int64_t>(r);
    return {iv, iv};
  }
  return {static_cast<std::int64_t>(std::floor(v)), static_cast<std::int64_t>(std::ceil(v))};
}

}  // namespace

FlowGraph build_circulation_graph(const Vec& s_tilde, const Matrix& u_prime, double kappa,
                                  const Vec& w, int K, const Neighborhood& nbh) {
  const int M = nbh.size();
  if (static_cast<int>(s_tilde.size()) != M || static_cast<int>(w.size()) != M)
    throw std::invalid_argument("vector lengths do not match station count");

  // The fractional point must conserve flow at every node.
  double s_total = 0.0;
  for (int n = 0; n < M; ++n) {
    double col = 0.0;
    for (int m = 0; m < M; ++m) col += u_prime[m][n];
    if (std::abs(col - s_tilde[n]) > kConsTol * std::max(1.0, s_tilde[n]))
      throw FlowError("fractional conservation violated at station column " + std::to_string(n) +
                      " (normalize the placement first)");
    s_total += s_tilde[n];
  }
  for (int m = 0; m < M; ++m) {
    double row = 0.0;
    for (int n = 0; n < M; ++n) row += u_prime[m][n];
    if (std::abs(row - w[m] * kappa) > kConsTol * std::max(1.0, w[m] * kappa))
      throw FlowError("fractional conservation violated at demand row " + std::to_string(m));
  }
  if (std::abs(s_total - K) > kConsTol * std::max(1.0, static_cast<double>(K)))
    throw FlowError("fractional placement total differs from K");

  FlowGraph g;
  g.station_count = M;
  g.K = K;
  for (int m = 0; m < M; ++m) {
    auto [lo, up] = bounds_around(w[m] * kappa);
    g.arcs.push_back({g.source(), g.left(m), lo, up, 0.0});
  }
  for (int m = 0; m < M; ++m) {
    for (int n : nbh.omega[m]) {
      auto [lo, up] = bounds_around(u_prime[m][n]);
      g.arcs.push_back({g.left(m), g.right(n), lo, up, 0.0});
    }
  }
  g.sink_arc_of_station.resize(M);
  for (int n = 0; n < M; ++n) {
    g.sink_arc_of_station[n] = static_cast<int>(g.arcs.size());
    if (s_tilde[n] <= 0.0) {
      g.arcs.push_back({g.right(n), g.sink(), 0, 0, 0.0});
    } else {
      auto [lo, up] = bounds_around(s_tilde[n]);
      double cost = static_cast<double>(lo) / s_tilde[n];
      g.arcs.push_back({g.right(n), g.sink(), lo, up, cost});
    }
  }
  g.arcs.push_back({g.sink(), g.source(), K, K, 0.0});
  return g;
}

// ---------------------------------------------------------------------------
// Min-cost circulation via the lower-bound reduction and successive shortest
// paths with potentials.
// ---------------------------------------------------------------------------

namespace {

struct ResidualNet {
  struct Edge {
    int to;
    std::int64_t cap;
    double cost;
    int rev;  // index of the reverse edge in adj[to]
  };
  std::vector<std::vector<Edge>> adj;

  explicit ResidualNet(int n) : adj(n) {}

  // Returns (node, index) of the forward edge.
  std::pair<int, int> add(int u, int v, std::int64_t cap, double cost) {
    adj[u].push_back({v, cap, cost, static_cast<int>(adj[v].size())});
    adj[v].push_back({u, 0, -cost, static_cast<int>(adj[u].size()) - 1});
    return {u, static_cast<int>(adj[u].size()) - 1};
  }
};

}  // namespace

IntegralFlow min_cost_circulation(const FlowGraph& graph) {
  const int n_nodes = graph.node_count();
  const int S = n_nodes;      // super source
  const int T = n_nodes + 1;  // super sink
  ResidualNet net(n_nodes + 2);

  for (const auto& a : graph.arcs) {
    if (a.lower > a.upper) throw FlowError("arc lower bound exceeds upper bound");
  }
  // Lower bounds shift onto node imbalances; residual capacity is up - lo.
  std::vector<std::int64_t> excess(n_nodes, 0);
  std::vector<std::pair<int, int>> arc_edge(graph.arcs.size());
  for (std::size_t i = 0; i < graph.arcs.size(); ++i) {
    const auto& a = graph.arcs[i];
    arc_edge[i] = net.add(a.tail, a.head, a.upper - a.lower, a.cost);
    excess[a.head] += a.lower;
    excess[a.tail] -= a.lower;
  }
  std::int64_t need = 0;
  for (int v = 0; v < n_nodes; ++v) {
    if (excess[v] > 0) {
      net.add(S, v, excess[v], 0.0);
      need += excess[v];
    } else if (excess[v] < 0) {
      net.add(v, T, -excess[v], 0.0);
    }
  }

  // Successive shortest paths S -> T; potentials keep reduced costs
  // nonnegative so Dijkstra applies throughout (all original costs are >= 0).
  const int N = n_nodes + 2;
  std::vector<double> pot(N, 0.0), dist(N);
  std::vector<int> pv(N), pe(N);
  std::int64_t sent = 0;
  while (sent < need) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    dist[S] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    pq.push({0.0, S});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u] + 1e-12) continue;
      for (std::size_t ei = 0; ei < net.adj[u].size(); ++ei) {
        const auto& e = net.adj[u][ei];
        if (e.cap <= 0) continue;
        double nd = d + e.cost + pot[u] - pot[e.to];
        if (nd < dist[e.to] - 1e-12) {
          dist[e.to] = nd;
          pv[e.to] = u;
          pe[e.to] = static_cast<int>(ei);
          pq.push({nd, e.to});
        }
      }
    }
    if (!std::isfinite(dist[T])) {
      // Cut witness: nodes reachable from the super source in the residual.
      std::ostringstream msg;
      msg << "infeasible circulation; deficient cut contains nodes {";
      bool first = true;
      for (int v = 0; v < n_nodes; ++v) {
        if (std::isfinite(dist[v])) {
          if (!first) msg << ",";
          msg << v;
          first = false;
        }
      }
      msg << "}";
      throw FlowError(msg.str());
    }
    for (int v = 0; v < N; ++v)
      if (std::isfinite(dist[v])) pot[v] += dist[v];
    std::int64_t push = need - sent;
    for (int v = T; v != S; v = pv[v]) push = std::min(push, net.adj[pv[v]][pe[v]].cap);
    for (int v = T; v != S; v = pv[v]) {
      auto& e = net.adj[pv[v]][pe[v]];
      e.cap -= push;
      net.adj[v][e.rev].cap += push;
    }
    sent += push;
  }

  IntegralFlow out;
  out.flow.resize(graph.arcs.size());
  for (std::size_t i = 0; i < graph.arcs.size(); ++i) {
    const auto& a = graph.arcs[i];
    const auto& fwd = net.adj[arc_edge[i].first][arc_edge[i].second];
    std::int64_t used = (a.upper - a.lower) - fwd.cap;
    out.flow[i] = a.lower + used;
    out.total_cost += a.cost * static_cast<double>(out.flow[i]);
  }
  return out;
}

int binding_pattern(const FractionalPlacement& frac) {
  const int L = static_cast<int>(frac.u_prime.size());
  const int M = static_cast<int>(frac.s_tilde.size());
  int best = 0;
  double best_util = -1.0;
  for (int l = 0; l < L; ++l) {
    double util = 0.0;
    for (int n = 0; n < M; ++n) {
      if (frac.s_tilde[n] <= 0.0) continue;
      double col = 0.0;
      for (int m = 0; m < M; ++m) col += frac.u_prime[l][m][n];
      util = std::max(util, col / frac.s_tilde[n]);
    }
    // Strict improvement keeps the lexicographically first maximizer.
    if (util > best_util + 1e-9) {
      best_util = util;
      best = l;
    }
  }
  return best;
}

IntegerPlacement round_mincost(const FractionalPlacement& frac, int pattern, int K,
                               const Neighborhood& nbh) {
  const int M = nbh.size();
  if (pattern < 0 || pattern >= static_cast<int>(frac.u_prime.size()))
    throw std::invalid_argument("pattern index out of range");
  if (!(frac.kappa > 0.0)) throw std::invalid_argument("fractional placement lacks kappa");

  // Stations can hold more capacity than the binding pattern routes to them
  // (other patterns or pooling need it). That surplus is pinned in place as
  // virtual demand on the diagonal arc so the circulation stays conserved.
  Matrix u = frac.u_prime[pattern];
  Vec w(M, 0.0);
  for (int m = 0; m < M; ++m) {
    double row = 0.0;
    for (int n = 0; n < M; ++n) row += u[m][n];
    w[m] = row;
  }
  for (int n = 0; n < M; ++n) {
    double col = 0.0;
    for (int m = 0; m < M; ++m) col += u[m][n];
    double deficit = frac.s_tilde[n] - col;
    if (deficit > 1e-12) {
      u[n][n] += deficit;
      w[n] += deficit;
    }
  }
  for (int m = 0; m < M; ++m) w[m] /= frac.kappa;

  FlowGraph g = build_circulation_graph(frac.s_tilde, u, frac.kappa, w, K, nbh);
  IntegralFlow flow = min_cost_circulation(g);
  IntegerPlacement out;
  out.s.resize(M);
  for (int n = 0; n < M; ++n)
    out.s[n] = static_cast<int>(flow.flow[g.sink_arc_of_station[n]]);
  out.provenance = "mincost";
  return out;
}

IntegerPlacement round_mincost(const FractionalPlacement& frac, int K, const Neighborhood& nbh) {
  return round_mincost(frac, binding_pattern(frac), K, nbh);
}

void write_dimacs(const FlowGraph& graph, std::ostream& os) {
  os << "c edgeplan circulation graph (node 0 = source, last = sink)\n";
  os << "p min " << graph.node_count() << " " << graph.arcs.size() << "\n";
  for (const auto& a : graph.arcs) {
    os << "a " << a.tail + 1 << " " << a.head + 1 << " " << a.lower << " " << a.upper << " "
       << a.cost << "\n";
  }
}

}  // namespace edgeplan
