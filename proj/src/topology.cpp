#include "edgeplan/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "edgeplan/rng.hpp"

namespace edgeplan {

namespace {

double dist2(const Station& a, const Station& b) {
  double dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

}  // namespace

void Neighborhood::validate() const {
  const int M = size();
  for (int m = 0; m < M; ++m) {
    const auto& omega_m = omega[m];
    if (omega_m.empty()) throw std::invalid_argument("neighborhood set is empty");
    bool self = false;
    for (int n : omega_m) {
      if (n < 0 || n >= M) throw std::invalid_argument("neighborhood index out of range");
      if (n == m) self = true;
    }
    if (!self) throw std::invalid_argument("neighborhood must contain the station itself");
    if (!std::is_sorted(omega_m.begin(), omega_m.end()))
      throw std::invalid_argument("neighborhood indices must be sorted");
  }
}

Neighborhood build_neighborhoods(const StationSet& stations, const NeighborhoodRule& rule) {
  const int M = stations.size();
  Neighborhood nbh;
  nbh.rule = rule;
  nbh.omega.resize(M);

  if (const auto* r = std::get_if<RadiusRule>(&rule)) {
    if (!(r->delta > 0)) throw std::invalid_argument("radius must be positive");
    double d2 = r->delta * r->delta;
    for (int m = 0; m < M; ++m) {
      for (int n = 0; n < M; ++n) {
        if (dist2(stations.stations[m], stations.stations[n]) <= d2) nbh.omega[m].push_back(n);
      }
    }
  } else if (const auto* k = std::get_if<KNearestRule>(&rule)) {
    if (k->k < 1 || k->k > M) throw std::invalid_argument("k must be in [1, M]");
    for (int m = 0; m < M; ++m) {
      std::vector<std::pair<double, int>> by_dist;
      by_dist.reserve(M - 1);
      for (int n = 0; n < M; ++n) {
        if (n != m) by_dist.push_back({dist2(stations.stations[m], stations.stations[n]), n});
      }
      // Euclidean ties broken by station index ascending.
      std::sort(by_dist.begin(), by_dist.end());
      nbh.omega[m].push_back(m);
      for (int i = 0; i < k->k - 1; ++i) nbh.omega[m].push_back(by_dist[i].second);
      std::sort(nbh.omega[m].begin(), nbh.omega[m].end());
    }
  } else {
    throw std::invalid_argument("explicit neighborhoods cannot be built from stations");
  }
  nbh.validate();
  return nbh;
}

Clustering kmeans_clusters(const StationSet& stations, int k, std::uint64_t seed) {
  const int M = stations.size();
  if (k < 1 || k > M) throw std::invalid_argument("k must be in [1, M]");
  Rng rng(seed);
  Clustering cl;
  cl.k = k;

  // k-means++ seeding: first center uniform, then proportional to squared
  // distance from the nearest chosen center.
  std::vector<int> centers;
  centers.push_back(static_cast<int>(rng.next_index(M)));
  std::vector<double> d2(M, std::numeric_limits<double>::infinity());
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (int m = 0; m < M; ++m) {
      d2[m] = std::min(d2[m], dist2(stations.stations[m], stations.stations[centers.back()]));
      total += d2[m];
    }
    int pick = -1;
    if (total <= 0.0) {
      // All remaining points coincide with a center; take the first unused.
      for (int m = 0; m < M && pick < 0; ++m)
        if (std::find(centers.begin(), centers.end(), m) == centers.end()) pick = m;
    } else {
      double target = rng.next_double() * total;
      double acc = 0.0;
      for (int m = 0; m < M; ++m) {
        acc += d2[m];
        if (acc >= target) {
          pick = m;
          break;
        }
      }
      if (pick < 0) pick = M - 1;
    }
    centers.push_back(pick);
  }

  std::vector<std::pair<double, double>> cents(k);
  for (int c = 0; c < k; ++c)
    cents[c] = {stations.stations[centers[c]].x, stations.stations[centers[c]].y};

  std::vector<int> assign(M, -1);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (int m = 0; m < M; ++m) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        double dx = stations.stations[m].x - cents[c].first;
        double dy = stations.stations[m].y - cents[c].second;
        double d = dx * dx + dy * dy;
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      if (assign[m] != best) {
        assign[m] = best;
        changed = true;
      }
    }
    std::vector<double> sx(k, 0.0), sy(k, 0.0);
    std::vector<int> cnt(k, 0);
    for (int m = 0; m < M; ++m) {
      sx[assign[m]] += stations.stations[m].x;
      sy[assign[m]] += stations.stations[m].y;
      cnt[assign[m]]++;
    }
    for (int c = 0; c < k; ++c) {
      if (cnt[c] == 0) {
        // Reseed an empty cluster from the point farthest from its centroid.
        int far = 0;
        double fd = -1.0;
        for (int m = 0; m < M; ++m) {
          double dx = stations.stations[m].x - cents[assign[m]].first;
          double dy = stations.stations[m].y - cents[assign[m]].second;
          double d = dx * dx + dy * dy;
          if (d > fd) {
            fd = d;
            far = m;
          }
        }
        cents[c] = {stations.stations[far].x, stations.stations[far].y};
        assign[far] = c;
        changed = true;
      } else {
        cents[c] = {sx[c] / cnt[c], sy[c] / cnt[c]};
      }
    }
    if (!changed) break;
  }

  cl.assignment = std::move(assign);
  cl.centroids = std::move(cents);
  cl.centroid_station.assign(k, -1);
  for (int c = 0; c < k; ++c) {
    double bd = std::numeric_limits<double>::infinity();
    for (int m = 0; m < M; ++m) {
      if (cl.assignment[m] != c) continue;
      double dx = stations.stations[m].x - cl.centroids[c].first;
      double dy = stations.stations[m].y - cl.centroids[c].second;
      double d = dx * dx + dy * dy;
      if (d < bd) {
        bd = d;
        cl.centroid_station[c] = m;
      }
    }
    if (cl.centroid_station[c] < 0) {
      // Cluster ended empty after the final sweep; pin it to the overall
      // nearest station so the invariant "centroid_station in cluster" holds.
      int nearest = 0;
      double nd = std::numeric_limits<double>::infinity();
      for (int m = 0; m < M; ++m) {
        double dx = stations.stations[m].x - cl.centroids[c].first;
        double dy = stations.stations[m].y - cl.centroids[c].second;
        if (dx * dx + dy * dy < nd) {
          nd = dx * dx + dy * dy;
          nearest = m;
        }
      }
      cl.centroid_station[c] = nearest;
      cl.assignment[nearest] = c;
    }
  }
  return cl;
}

}  // namespace edgeplan
