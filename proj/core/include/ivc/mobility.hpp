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

#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ivc/geometry.hpp"
#include "ivc/roadnet.hpp"

namespace ivc {

/// Seconds; +infinity stands for "never leaves range".
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

inline constexpr double kmh_to_ms(double kmh) { return kmh / 3.6; }

/// One piece of a vehicle's plan: constant speed along one segment.
struct PlanLeg {
  SegmentLocator segment;
  double entry_time = 0.0;  // s
  double speed = 0.0;       // m/s
  double entry_offset = 0.0;  // arc length (m) at which the leg starts
};

struct VehicleTrajectory {
  std::string vehicle_id;
  std::vector<PlanLeg> plan;
};

struct Pose {
  Point position;
  double speed = 0.0;
  SegmentLocator segment;
  double time = 0.0;
  Vec2 heading{1.0, 0.0};
  double offset = 0.0;  // arc length along `segment`
};

struct TimeInterval {
  double begin = 0.0;
  double end = 0.0;
  double duration() const { return end - begin; }
};

/// Throws ValidationError when locators do not resolve, entry times are not
/// increasing, speeds are negative, legs are not adjacent, or a leg starts
/// before the previous one could have reached its segment end.
void validate_trajectory(const VehicleTrajectory& traj, const RoadNetwork& net);

/// Builds a plan that drives `route` at constant `speed` from `start_time`,
/// beginning `start_offset` meters along the route (segments wholly behind
/// that point are skipped).
VehicleTrajectory make_trajectory(std::string vehicle_id, const std::vector<SegmentLocator>& route,
                                  double start_time, double speed, const RoadNetwork& net,
                                  double start_offset = 0.0);

/// [first entry, time the last leg reaches its segment end]; unbounded when
/// the last leg has zero speed.
TimeInterval active_interval(const VehicleTrajectory& traj, const RoadNetwork& net);

/// Kinematic interpolation. Throws DomainError outside the active interval.
Pose pose_at(const VehicleTrajectory& traj, const RoadNetwork& net, double t);

/// Pass-through contact time 2R / v_rel; kUnbounded when v_rel is zero.
double contact_duration_1d(double range_m, double v_rel);

struct InRangeRow {
  double speed_kmh = 0.0;
  double speed_ms = 0.0;        // km/h / 3.6 shown to 0.1 m/s, as the published table does
  double duration_exact = 0.0;  // 2R / speed_ms
  int duration_floor = 0;       // floor of duration_exact shown to 0.1 s
  std::optional<int> published;  // published value for this speed, when there is one
  bool matches_published() const { return published && *published == duration_floor; }
};

/// One row per speed, one vehicle moving and the other stationary.
std::vector<InRangeRow> in_range_table(double range_m, const std::vector<double>& speeds_kmh);

struct ContactOptions {
  double sample_dt = 0.1;
  double refine_tol = 1e-3;
};

/// Earliest maximal interval (within the overlap of both active intervals)
/// during which the vehicles are within range_m of each other.
std::optional<TimeInterval> contact_interval(const VehicleTrajectory& a, const VehicleTrajectory& b,
                                             const RoadNetwork& net, double range_m,
                                             const ContactOptions& opts = {});

}  // namespace ivc
