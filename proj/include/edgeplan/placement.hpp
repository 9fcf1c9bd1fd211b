#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "edgeplan/topology.hpp"
#include "edgeplan/types.hpp"

namespace edgeplan {

struct PlacementParams {
  int K = 1;       // total servers
  double C = 1.0;  // capacity of one server, workload units per slot
};

// Fractional solution of the robust placement LPs, with the recovered
// routing. s_tilde sums to K; each routing row is stochastic with support in
// the station's neighborhood; beta_star is the max-utilization bound and
// eta_star the resource pooling factor (NaN until the pooling solve ran).
struct FractionalPlacement {
  Vec s_tilde;
  double beta_star = 0.0;
  double eta_star = std::numeric_limits<double>::quiet_NaN();
  std::vector<Matrix> routing;  // per representative; rows sum to 1

  // Substituted variables backing the min-cost rounding: load-normalized
  // routing with row sums w^l_m * kappa and column sums <= s_tilde.
  std::vector<Matrix> u_prime;
  double kappa = 0.0;
};

struct IntegerPlacement {
  std::vector<int> s;
  std::string provenance;  // rounding scheme tag

  int total() const {
    int t = 0;
    for (int v : s) t += v;
    return t;
  }
};

enum class RoundingScheme { SRPF, RR, LRPF, LDF, LSF };

std::string to_string(RoundingScheme s);

// Session over fixed (representatives, neighborhoods, C, caps); solving for a
// new K re-optimizes warm from the previous basis. The pure entry points
// below construct a throwaway session.
class RoRpSolver {
 public:
  RoRpSolver(RepresentativeSet reps, Neighborhood nbh, double C,
             std::optional<Vec> s_cap = std::nullopt);
  ~RoRpSolver();
  RoRpSolver(RoRpSolver&&) noexcept;
  RoRpSolver& operator=(RoRpSolver&&) noexcept;

  FractionalPlacement solve_ro(int K);
  FractionalPlacement solve_rp(int K, double beta_star);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

FractionalPlacement solve_ro_fractional(const RepresentativeSet& reps, const Neighborhood& nbh,
                                        const PlacementParams& params);

FractionalPlacement solve_rp_fractional(const RepresentativeSet& reps, const Neighborhood& nbh,
                                        const PlacementParams& params, double beta_star);

// Largest eta with eta * max_l w^l_m <= pool_m for every station with positive
// peak workload; +infinity when every peak is zero.
double pooling_factor(const Vec& s, const RepresentativeSet& reps, const Neighborhood& nbh);
double pooling_factor(const std::vector<int>& s, const RepresentativeSet& reps,
                      const Neighborhood& nbh);

// Floor everything, then hand the K - sum(floor) round-ups to the stations
// ranked first by the scheme's priority; ties break by station index.
IntegerPlacement round_heuristic(const FractionalPlacement& frac, RoundingScheme scheme,
                                 const Neighborhood& nbh, int K, std::uint64_t seed);

// Generalized form used by day scheduling, where the target is ceil(sum s):
// requires sum(floor(s)) <= K <= sum(ceil(s)).
IntegerPlacement round_up_to_target(const Vec& s_tilde, RoundingScheme scheme,
                                    const Neighborhood& nbh, int K, std::uint64_t seed);

// Simplex weights lambda >= 0 (sum 1) minimizing total weight subject to
// w <= sum_l lambda_l w^l; throws when w is outside the hull.
Vec find_hull_weights(const Vec& w, const RepresentativeSet& reps);

// Routing for an in-hull workload, mixing the per-pattern routings by
// pattern share of each station's workload.
Matrix construct_routing(const Vec& w, const RepresentativeSet& reps,
                         const std::vector<Matrix>& routing, const Vec& lambda,
                         const Neighborhood& nbh);

// Utilization bound under a burst of relative size gamma: beta + gamma / eta.
double utilization_bound(double beta_star, double eta_star, double gamma);

}  // namespace edgeplan
