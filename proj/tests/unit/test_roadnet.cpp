// Copyright 2026 The ivcsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>

#include "ivc/error.hpp"
#include "ivc/roadnet.hpp"
#include "support.hpp"

using namespace ivc;

TEST_SUITE("roadnet") {

TEST_CASE("locator round trip and canonical form") {
  const auto loc = parse_locator("5-william-2");
  CHECK(loc.road_id == 5);
  CHECK(loc.road_name == "william");
  CHECK(loc.segment_id == 2);
  CHECK(format_locator(loc) == "5-william-2");
  CHECK(format_locator(parse_locator("007-a_b-010")) == "7-a_b-10");
}

TEST_CASE("locator diagnostics name the broken component") {
  auto msg = [](std::string_view text) {
    try {
      parse_locator(text);
    } catch (const ParseError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(msg("x-main-1").find("road_id") != std::string::npos);
  CHECK(msg("1-Main-1").find("road_name") != std::string::npos);
  CHECK(msg("1-main-").find("segment_id") != std::string::npos);
  CHECK(msg("1-main").find("3 '-'-separated") != std::string::npos);
  CHECK(msg("1-main-2-3").find("found 4") != std::string::npos);
  CHECK(msg("").find("empty") != std::string::npos);
}

TEST_CASE("segment geometry on an L-shaped polyline") {
  const Segment s(1, {{0, 0}, {30, 0}, {30, 40}});
  CHECK(s.length() == doctest::Approx(70.0));
  CHECK(s.point_at(15).x == doctest::Approx(15.0));
  CHECK(s.point_at(50).y == doctest::Approx(20.0));
  CHECK(s.point_at(-5) == Point{0, 0});
  CHECK(s.point_at(500) == Point{30, 40});
  CHECK(s.heading_at(10).x == doctest::Approx(1.0));
  CHECK(s.heading_at(40).y == doctest::Approx(1.0));
  CHECK(s.project({31, 20}) == doctest::Approx(50.0));
  // Centroid weights each edge by length: (30*(15,0) + 40*(30,20)) / 70.
  CHECK(s.centroid().x == doctest::Approx((30 * 15.0 + 40 * 30.0) / 70.0));
  CHECK(s.centroid().y == doctest::Approx(40 * 20.0 / 70.0));
}

TEST_CASE("segment construction rejects degenerate input") {
  CHECK_THROWS_AS(Segment(0, {{0, 0}, {1, 0}}), ValidationError);
  CHECK_THROWS_AS(Segment(1, {{0, 0}}), ValidationError);
  CHECK_THROWS_AS(Segment(1, {{0, 0}, {0, 0}}), ValidationError);
}

TEST_CASE("resolve checks id, name and segment") {
  const auto net = testing::straight_road(3, "main", 4, 100);
  CHECK(net.resolve(parse_locator("3-main-2")).start() == Point{100, 0});
  CHECK_THROWS_AS(net.resolve(parse_locator("4-main-2")), LookupError);
  CHECK_THROWS_AS(net.resolve(parse_locator("3-side-2")), LookupError);
  CHECK_THROWS_AS(net.resolve(parse_locator("3-main-9")), LookupError);
  CHECK(net.contains(parse_locator("3-main-4")));
  CHECK_FALSE(net.contains(parse_locator("3-main-5")));
  CHECK(net.all_locators().size() == 4);
}

TEST_CASE("adjacency follows the direction of travel") {
  const auto net = testing::straight_road(1, "main", 3, 100);
  CHECK(net.adjacent(parse_locator("1-main-1"), parse_locator("1-main-2")));
  CHECK_FALSE(net.adjacent(parse_locator("1-main-2"), parse_locator("1-main-1")));
  CHECK_FALSE(net.adjacent(parse_locator("1-main-1"), parse_locator("1-main-3")));
}

TEST_CASE("locate_point picks the nearest segment within tolerance") {
  const auto net = testing::straight_road(1, "main", 3, 100);
  CHECK(net.locate_point({150, 2}, 5) == parse_locator("1-main-2"));
  // Exactly on a shared endpoint: lower segment id wins.
  CHECK(net.locate_point({100, 0}, 5) == parse_locator("1-main-1"));
  CHECK_THROWS_AS(net.locate_point({150, 20}, 5), LookupError);
}

namespace {

// Directed one-segment roads over a 3x3 lattice of junctions, both ways.
RoadNetwork lattice(std::vector<std::pair<Point, Point>>& edges) {
  std::vector<Road> roads;
  std::int64_t id = 1;
  auto add = [&](Point a, Point b) {
    edges.emplace_back(a, b);
    roads.push_back(Road{id, "e" + std::to_string(id), {Segment(1, {a, b})}});
    ++id;
  };
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Point p{i * 100.0, j * 100.0};
      if (i < 2) {
        add(p, {p.x + 100.0, p.y});
        add({p.x + 100.0, p.y}, p);
      }
      if (j < 2) {
        // Upward links are kinked, so up and down lengths differ.
        roads.push_back(Road{id, "e" + std::to_string(id), {Segment(1, {p, {p.x + 10.0, p.y + 50.0}, {p.x, p.y + 100.0}})}});
        edges.emplace_back(p, Point{p.x, p.y + 100.0});
        ++id;
        add({p.x, p.y + 100.0}, p);
      }
    }
  }
  return RoadNetwork(roads);
}

}  // namespace

TEST_CASE("k shortest routes agree with exhaustive enumeration") {
  std::vector<std::pair<Point, Point>> edges;
  const RoadNetwork net = lattice(edges);
  const auto locs = net.all_locators();

  // Independent adjacency straight from the geometry.
  auto next_of = [&](const SegmentLocator& from) {
    std::vector<SegmentLocator> out;
    const Segment& a = net.resolve(from);
    for (const auto& to : locs) {
      if (to.road_id == from.road_id) continue;
      if (distance(a.end(), net.resolve(to).start()) <= 0.5) out.push_back(to);
    }
    return out;
  };
  auto length_after_first = [&](const std::vector<SegmentLocator>& p) {
    double sum = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) sum += net.resolve(p[i]).length();
    return sum;
  };

  for (const auto& from : {locs.front(), locs[3]}) {
    for (const auto& to : {locs.back(), locs[locs.size() / 2]}) {
      if (from == to) continue;
      std::vector<std::vector<SegmentLocator>> all;
      std::vector<SegmentLocator> path{from};
      std::function<void()> dfs = [&] {
        if (path.back() == to) {
          all.push_back(path);
          return;
        }
        for (const auto& n : next_of(path.back())) {
          if (std::find(path.begin(), path.end(), n) != path.end()) continue;
          path.push_back(n);
          dfs();
          path.pop_back();
        }
      };
      dfs();
      std::vector<double> lengths;
      for (const auto& p : all) lengths.push_back(length_after_first(p));
      std::sort(lengths.begin(), lengths.end());

      const std::size_t k = 6;
      const auto routes = net.routes_between(from, to, k);
      REQUIRE(routes.size() == std::min(k, all.size()));
      for (std::size_t i = 0; i < routes.size(); ++i) {
        CHECK(routes[i].length == doctest::Approx(lengths[i]));
        CHECK(routes[i].length == doctest::Approx(length_after_first(routes[i].segments)));
        CHECK(std::find(all.begin(), all.end(), routes[i].segments) != all.end());
      }
      for (std::size_t i = 0; i < routes.size(); ++i) {
        for (std::size_t j = i + 1; j < routes.size(); ++j) CHECK(routes[i].segments != routes[j].segments);
      }
    }
  }
}

TEST_CASE("routes to an unreachable segment are empty") {
  const auto net = testing::straight_road(1, "main", 3, 100);
  CHECK(net.routes_between(parse_locator("1-main-3"), parse_locator("1-main-1"), 3).empty());
  const auto one = net.routes_between(parse_locator("1-main-1"), parse_locator("1-main-3"), 3);
  REQUIRE(one.size() == 1);
  CHECK(one[0].length == doctest::Approx(200.0));
}

}
