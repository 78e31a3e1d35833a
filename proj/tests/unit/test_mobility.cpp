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

#include <cmath>

#include "ivc/error.hpp"
#include "ivc/mobility.hpp"
#include "support.hpp"

using namespace ivc;

namespace {

const RoadNetwork& road() {
  static const RoadNetwork net = testing::straight_road(1, "main", 5, 1000);
  return net;
}

std::vector<SegmentLocator> route(int n) {
  std::vector<SegmentLocator> r;
  for (int k = 1; k <= n; ++k) r.push_back({1, "main", k});
  return r;
}

}  // namespace

TEST_SUITE("mobility") {

TEST_CASE("pose_at matches a small-step integrator") {
  // Two legs with a 20 s stop at the segment boundary.
  VehicleTrajectory traj{"v", {{{1, "main", 1}, 0.0, 20.0, 200.0}, {{1, "main", 2}, 60.0, 12.5, 0.0}}};
  validate_trajectory(traj, road());

  // Independent oracle: advance x by v*dt, holding at the end of segment 1
  // until the next leg begins.
  double x = 200.0;
  const double dt = 1e-3;
  for (int step = 0; step <= 100000; ++step) {
    const double t = step * dt;
    if (step % 5000 == 0) {
      const Pose p = pose_at(traj, road(), t);
      CHECK(p.position.x == doctest::Approx(x).epsilon(1e-6));
      CHECK(p.position.y == 0.0);
    }
    const double v = t < 60.0 ? (x < 1000.0 ? 20.0 : 0.0) : 12.5;
    x = std::min(t < 60.0 ? 1000.0 : 2000.0, x + v * dt);
  }
}

TEST_CASE("pose_at outside the active window throws") {
  const auto traj = make_trajectory("v", route(2), 10.0, 25.0, road());
  const auto window = active_interval(traj, road());
  CHECK(window.begin == 10.0);
  CHECK(window.end == doctest::Approx(10.0 + 2000.0 / 25.0));
  CHECK_THROWS_AS(pose_at(traj, road(), 9.0), DomainError);
  CHECK_THROWS_AS(pose_at(traj, road(), window.end + 1.0), DomainError);
  CHECK(pose_at(traj, road(), window.end).position.x == doctest::Approx(2000.0));
}

TEST_CASE("a parked last leg is active forever") {
  VehicleTrajectory traj{"p", {{{1, "main", 3}, 0.0, 0.0, 40.0}}};
  CHECK(std::isinf(active_interval(traj, road()).end));
  CHECK(pose_at(traj, road(), 1e6).position.x == doctest::Approx(2040.0));
}

TEST_CASE("make_trajectory skips segments behind the start offset") {
  const auto traj = make_trajectory("v", route(4), 0.0, 10.0, road(), 2500.0);
  REQUIRE(traj.plan.size() == 2);
  CHECK(traj.plan[0].segment.segment_id == 3);
  CHECK(traj.plan[0].entry_offset == doctest::Approx(500.0));
  CHECK(traj.plan[1].entry_time == doctest::Approx(50.0));
  validate_trajectory(traj, road());
}

TEST_CASE("validate_trajectory rejects impossible plans") {
  VehicleTrajectory teleport{"v", {{{1, "main", 1}, 0.0, 10.0, 0.0}, {{1, "main", 2}, 50.0, 10.0, 0.0}}};
  CHECK_THROWS_AS(validate_trajectory(teleport, road()), ValidationError);
  VehicleTrajectory gap{"v", {{{1, "main", 1}, 0.0, 10.0, 0.0}, {{1, "main", 3}, 200.0, 10.0, 0.0}}};
  CHECK_THROWS_AS(validate_trajectory(gap, road()), ValidationError);
  VehicleTrajectory bad_loc{"v", {{{1, "side", 1}, 0.0, 10.0, 0.0}}};
  CHECK_THROWS_AS(validate_trajectory(bad_loc, road()), ValidationError);
  VehicleTrajectory negative{"v", {{{1, "main", 1}, 0.0, -1.0, 0.0}}};
  CHECK_THROWS_AS(validate_trajectory(negative, road()), ValidationError);
  VehicleTrajectory empty{"v", {}};
  CHECK_THROWS_AS(validate_trajectory(empty, road()), ValidationError);
}

TEST_CASE("pass-through contact is 2R over relative speed") {
  CHECK(contact_duration_1d(100.0, 16.0 / 3.6) == doctest::Approx(45.0));
  CHECK(std::isinf(contact_duration_1d(100.0, 0.0)));
  CHECK_THROWS_AS(contact_duration_1d(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(contact_duration_1d(100.0, -1.0), DomainError);
}

TEST_CASE("in-range table uses the 0.1 m/s speed column") {
  const auto rows = in_range_table(100.0, {100, 80, 60, 40, 20});
  const double exact[] = {200 / 27.8, 200 / 22.2, 200 / 16.7, 200 / 11.1, 200 / 5.6};
  const int floors[] = {7, 9, 12, 18, 35};
  const int published[] = {7, 10, 13, 18, 35};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].duration_exact == doctest::Approx(exact[i]));
    CHECK(rows[i].duration_floor == floors[i]);
    REQUIRE(rows[i].published);
    CHECK(*rows[i].published == published[i]);
  }
  CHECK(rows[0].matches_published());
  CHECK_FALSE(rows[1].matches_published());
  CHECK_FALSE(rows[2].matches_published());
  CHECK(rows[3].matches_published());
  CHECK(rows[4].matches_published());

  const auto wide = in_range_table(225.0, {100});
  CHECK(wide[0].duration_exact == doctest::Approx(16.2).epsilon(0.005));
  CHECK_FALSE(wide[0].published);
  CHECK_THROWS_AS(in_range_table(100.0, {0}), DomainError);
}

TEST_CASE("contact_interval for an overtaking pair") {
  const auto slow = make_trajectory("slow", route(3), 0.0, kmh_to_ms(90), road(), 150.0);
  const auto fast = make_trajectory("fast", route(3), 0.0, kmh_to_ms(106), road(), 0.0);
  const auto c = contact_interval(slow, fast, road(), 100.0);
  REQUIRE(c);
  const double vrel = kmh_to_ms(16);
  CHECK(c->begin == doctest::Approx(50.0 / vrel).epsilon(1e-4));
  CHECK(c->end == doctest::Approx(250.0 / vrel).epsilon(1e-4));
  CHECK(c->duration() == doctest::Approx(45.0).epsilon(1e-4));
}

TEST_CASE("contact_interval with no meeting") {
  const auto a = make_trajectory("a", route(1), 0.0, 10.0, road(), 0.0);
  const auto b = make_trajectory("b", route(3), 0.0, 10.0, road(), 2500.0);
  CHECK_FALSE(contact_interval(a, b, road(), 100.0));
}

}
