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

#include "ivc/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ivc/error.hpp"

namespace ivc {

namespace {

constexpr double kTimeEps = 1e-9;

const std::map<int, int>& published_in_range_seconds() {
  // Class 1 device, 100 m nominal range.
  static const std::map<int, int> table{{100, 7}, {80, 10}, {60, 13}, {40, 18}, {20, 35}};
  return table;
}

double leg_end_time(const PlanLeg& leg, const Segment& seg) {
  if (leg.speed <= 0.0) return kUnbounded;
  return leg.entry_time + (seg.length() - leg.entry_offset) / leg.speed;
}

}  // namespace

void validate_trajectory(const VehicleTrajectory& traj, const RoadNetwork& net) {
  const std::string who = "vehicle '" + traj.vehicle_id + "'";
  if (traj.plan.empty()) throw ValidationError(who + ": plan is empty");
  for (std::size_t i = 0; i < traj.plan.size(); ++i) {
    const PlanLeg& leg = traj.plan[i];
    const std::string where = who + " leg " + std::to_string(i) + " (" + format_locator(leg.segment) + ")";
    const Segment* seg = nullptr;
    try {
      seg = &net.resolve(leg.segment);
    } catch (const LookupError& e) {
      throw ValidationError(who + ": " + e.what());
    }
    if (!(leg.speed >= 0.0) || !std::isfinite(leg.speed)) throw ValidationError(where + ": speed must be >= 0");
    if (!std::isfinite(leg.entry_time)) throw ValidationError(where + ": entry time must be finite");
    if (leg.entry_offset < 0.0 || leg.entry_offset >= seg->length()) {
      throw ValidationError(where + ": entry offset outside segment");
    }
    if (i == 0) continue;
    const PlanLeg& prev = traj.plan[i - 1];
    if (!(leg.entry_time > prev.entry_time)) throw ValidationError(where + ": entry times must strictly increase");
    if (!net.adjacent(prev.segment, leg.segment)) {
      throw ValidationError(where + ": not adjacent to " + format_locator(prev.segment));
    }
    if (leg.entry_offset != 0.0) throw ValidationError(where + ": only the first leg may start mid-segment");
    const double reach = leg_end_time(prev, net.resolve(prev.segment));
    if (leg.entry_time + 1e-6 < reach) {
      throw ValidationError(where + ": entered before previous leg could reach its segment end");
    }
  }
}

VehicleTrajectory make_trajectory(std::string vehicle_id, const std::vector<SegmentLocator>& route,
                                  double start_time, double speed, const RoadNetwork& net, double start_offset) {
  VehicleTrajectory traj{std::move(vehicle_id), {}};
  double t = start_time;
  double offset = start_offset;
  std::size_t first = 0;
  // An offset past the first segment starts further down the route.
  while (first + 1 < route.size() && offset >= net.resolve(route[first]).length()) {
    offset -= net.resolve(route[first]).length();
    ++first;
  }
  for (std::size_t i = first; i < route.size(); ++i) {
    const auto& loc = route[i];
    traj.plan.push_back({loc, t, speed, offset});
    if (speed <= 0.0) break;
    t += (net.resolve(loc).length() - offset) / speed;
    offset = 0.0;
  }
  return traj;
}

TimeInterval active_interval(const VehicleTrajectory& traj, const RoadNetwork& net) {
  const PlanLeg& last = traj.plan.back();
  return {traj.plan.front().entry_time, leg_end_time(last, net.resolve(last.segment))};
}

Pose pose_at(const VehicleTrajectory& traj, const RoadNetwork& net, double t) {
  if (traj.plan.empty()) throw DomainError("vehicle '" + traj.vehicle_id + "' has an empty plan");
  const TimeInterval window = active_interval(traj, net);
  if (t < window.begin - kTimeEps || t > window.end + kTimeEps) {
    throw DomainError("vehicle '" + traj.vehicle_id + "': t=" + std::to_string(t) +
                      " outside active window [" + std::to_string(window.begin) + ", " +
                      std::to_string(window.end) + "]");
  }
  // Last leg whose entry time is <= t.
  auto it = std::upper_bound(traj.plan.begin(), traj.plan.end(), t,
                             [](double v, const PlanLeg& leg) { return v < leg.entry_time; });
  const PlanLeg& leg = it == traj.plan.begin() ? traj.plan.front() : *std::prev(it);
  const Segment& seg = net.resolve(leg.segment);
  const double dt = std::max(0.0, t - leg.entry_time);
  const double s = std::min(seg.length(), leg.entry_offset + leg.speed * dt);
  Pose pose;
  pose.position = seg.point_at(s);
  pose.speed = leg.speed;
  pose.segment = leg.segment;
  pose.time = t;
  pose.heading = seg.heading_at(s);
  pose.offset = s;
  return pose;
}

double contact_duration_1d(double range_m, double v_rel) {
  if (!(range_m > 0.0)) throw DomainError("contact_duration_1d: range must be positive");
  if (!(v_rel >= 0.0)) throw DomainError("contact_duration_1d: relative speed must be non-negative");
  if (v_rel == 0.0) return kUnbounded;
  return 2.0 * range_m / v_rel;
}

std::vector<InRangeRow> in_range_table(double range_m, const std::vector<double>& speeds_kmh) {
  std::vector<InRangeRow> rows;
  rows.reserve(speeds_kmh.size());
  for (double kmh : speeds_kmh) {
    if (!(kmh > 0.0)) throw DomainError("in_range_table: speeds must be positive");
    InRangeRow row;
    row.speed_kmh = kmh;
    row.speed_ms = std::round(kmh_to_ms(kmh) * 10.0) / 10.0;
    if (row.speed_ms <= 0.0) row.speed_ms = kmh_to_ms(kmh);
    row.duration_exact = contact_duration_1d(range_m, row.speed_ms);
    row.duration_floor = static_cast<int>(std::floor(std::round(row.duration_exact * 10.0) / 10.0));
    const double rounded_kmh = std::round(kmh);
    if (range_m == 100.0 && rounded_kmh == kmh) {
      const auto& published = published_in_range_seconds();
      if (auto p = published.find(static_cast<int>(rounded_kmh)); p != published.end()) row.published = p->second;
    }
    rows.push_back(row);
  }
  return rows;
}

std::optional<TimeInterval> contact_interval(const VehicleTrajectory& a, const VehicleTrajectory& b,
                                             const RoadNetwork& net, double range_m, const ContactOptions& opts) {
  const TimeInterval wa = active_interval(a, net);
  const TimeInterval wb = active_interval(b, net);
  const double t0 = std::max(wa.begin, wb.begin);
  const double t1 = std::min(wa.end, wb.end);
  if (t1 < t0) return std::nullopt;

  // With both vehicles parked forever the geometry is frozen after the last
  // leg starts, so sampling can stop there.
  const bool open_ended = std::isinf(t1);
  const double horizon =
      open_ended ? std::max({t0, a.plan.back().entry_time, b.plan.back().entry_time}) : t1;

  auto in_range = [&](double t) {
    return distance(pose_at(a, net, t).position, pose_at(b, net, t).position) <= range_m;
  };
  auto bisect = [&](double out_t, double in_t) {
    while (std::abs(in_t - out_t) > opts.refine_tol) {
      const double mid = 0.5 * (in_t + out_t);
      (in_range(mid) ? in_t : out_t) = mid;
    }
    return 0.5 * (in_t + out_t);
  };

  const auto steps = static_cast<std::size_t>(std::ceil((horizon - t0) / opts.sample_dt));
  auto sample_time = [&](std::size_t i) { return i >= steps ? horizon : t0 + static_cast<double>(i) * opts.sample_dt; };

  std::optional<double> enter;
  std::size_t i = 0;
  for (; i <= steps; ++i) {
    const double t = sample_time(i);
    if (in_range(t)) {
      enter = i == 0 ? t0 : bisect(sample_time(i - 1), t);
      break;
    }
  }
  if (!enter) return std::nullopt;
  for (++i; i <= steps; ++i) {
    const double t = sample_time(i);
    if (!in_range(t)) return TimeInterval{*enter, bisect(t, sample_time(i - 1))};
  }
  return TimeInterval{*enter, open_ended ? kUnbounded : t1};
}

}  // namespace ivc
