#pragma once

#include <cstdint>
#include <stdexcept>
#include <variant>
#include <vector>

#include "edgeplan/types.hpp"

namespace edgeplan {

struct RadiusRule {
  double delta = 0.0;  // meters
};
struct KNearestRule {
  int k = 1;
};
struct ExplicitRule {};

using NeighborhoodRule = std::variant<RadiusRule, KNearestRule, ExplicitRule>;

// Serving neighborhoods: omega[m] lists the stations whose servers may take
// station m's workload. Always contains m; indices sorted ascending.
struct Neighborhood {
  std::vector<std::vector<int>> omega;
  NeighborhoodRule rule = ExplicitRule{};

  int size() const { return static_cast<int>(omega.size()); }
  void validate() const;
};

Neighborhood build_neighborhoods(const StationSet& stations, const NeighborhoodRule& rule);

struct Clustering {
  int k = 0;
  std::vector<int> assignment;       // station -> cluster id in [0, k)
  std::vector<std::pair<double, double>> centroids;
  std::vector<int> centroid_station;  // nearest actual station to each centroid
};

// Lloyd's iteration from k-means++ style seeding; deterministic for a fixed
// seed. Terminates at an assignment fixpoint or after 100 iterations; empty
// clusters are reseeded from the farthest point.
Clustering kmeans_clusters(const StationSet& stations, int k, std::uint64_t seed);

}  // namespace edgeplan
