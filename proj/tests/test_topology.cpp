#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "edgeplan/rng.hpp"
#include "edgeplan/topology.hpp"

using namespace edgeplan;

namespace {

StationSet line_stations(std::initializer_list<double> xs) {
  StationSet st;
  int i = 0;
  for (double x : xs) st.stations.push_back({"s" + std::to_string(i++), x, 0.0});
  return st;
}

double sq_obj(const StationSet& st, const Clustering& cl) {
  double total = 0;
  for (int m = 0; m < st.size(); ++m) {
    double dx = st.stations[m].x - cl.centroids[cl.assignment[m]].first;
    double dy = st.stations[m].y - cl.centroids[cl.assignment[m]].second;
    total += dx * dx + dy * dy;
  }
  return total;
}

}  // namespace

TEST_CASE("radius neighborhoods") {
  auto st = line_stations({0, 1, 2});
  auto nbh = build_neighborhoods(st, RadiusRule{1.0});
  CHECK(nbh.omega[0] == std::vector<int>{0, 1});
  CHECK(nbh.omega[1] == std::vector<int>{0, 1, 2});
  CHECK(nbh.omega[2] == std::vector<int>{1, 2});

  SUBCASE("isolation when the radius is below every pairwise distance") {
    auto iso = build_neighborhoods(st, RadiusRule{0.5});
    for (int m = 0; m < 3; ++m) CHECK(iso.omega[m] == std::vector<int>{m});
  }
  SUBCASE("radius symmetry") {
    for (int m = 0; m < 3; ++m)
      for (int n : nbh.omega[m]) {
        bool back = false;
        for (int x : nbh.omega[n]) back |= (x == m);
        CHECK(back);
      }
  }
  SUBCASE("monotone in the radius") {
    auto big = build_neighborhoods(st, RadiusRule{2.0});
    for (int m = 0; m < 3; ++m)
      for (int n : nbh.omega[m])
        CHECK(std::count(big.omega[m].begin(), big.omega[m].end(), n) == 1);
  }
}

TEST_CASE("k-nearest neighborhoods") {
  auto st = line_stations({0, 1, 2, 10});
  auto nbh = build_neighborhoods(st, KNearestRule{2});
  CHECK(nbh.omega[0] == std::vector<int>{0, 1});
  CHECK(nbh.omega[3] == std::vector<int>{2, 3});
  // Tie between stations 0 and 2 from station 1 resolves to the lower index.
  CHECK(nbh.omega[1] == std::vector<int>{0, 1});

  auto all = build_neighborhoods(st, KNearestRule{4});
  for (int m = 0; m < 4; ++m) CHECK(all.omega[m].size() == 4);

  CHECK_THROWS_AS(build_neighborhoods(st, KNearestRule{5}), std::invalid_argument);
}

TEST_CASE("kmeans basics") {
  auto st = line_stations({0, 1, 2, 3});
  SUBCASE("k=1 centroid is the coordinate mean") {
    auto cl = kmeans_clusters(st, 1, 3);
    CHECK(cl.centroids[0].first == doctest::Approx(1.5));
    for (int a : cl.assignment) CHECK(a == 0);
  }
  SUBCASE("k=M puts each station in its own cluster") {
    auto cl = kmeans_clusters(st, 4, 3);
    std::set<int> ids(cl.assignment.begin(), cl.assignment.end());
    CHECK(ids.size() == 4);
  }
  SUBCASE("well-separated pairs cluster together") {
    StationSet pairs;
    pairs.stations = {{"a", 0, 0}, {"b", 1, 0}, {"c", 100, 0}, {"d", 101, 0}};
    auto cl = kmeans_clusters(pairs, 2, 5);
    CHECK(cl.assignment[0] == cl.assignment[1]);
    CHECK(cl.assignment[2] == cl.assignment[3]);
    CHECK(cl.assignment[0] != cl.assignment[2]);
    // Brute-force optimal 2-clustering of 4 collinear points is the pairing;
    // Lloyd's objective must match it.
    CHECK(sq_obj(pairs, cl) == doctest::Approx(0.5 + 0.5));
  }
  SUBCASE("deterministic for a fixed seed") {
    auto a = kmeans_clusters(st, 2, 11);
    auto b = kmeans_clusters(st, 2, 11);
    CHECK(a.assignment == b.assignment);
  }
  SUBCASE("centroid station belongs to its cluster") {
    Rng rng(99);
    StationSet rs;
    for (int i = 0; i < 40; ++i)
      rs.stations.push_back({"r" + std::to_string(i), rng.next_double() * 100,
                             rng.next_double() * 100});
    for (int k : {1, 3, 7}) {
      auto cl = kmeans_clusters(rs, k, 123);
      for (int c = 0; c < k; ++c) CHECK(cl.assignment[cl.centroid_station[c]] == c);
      for (int m = 0; m < rs.size(); ++m) {
        CHECK(cl.assignment[m] >= 0);
        CHECK(cl.assignment[m] < k);
      }
    }
  }
}
