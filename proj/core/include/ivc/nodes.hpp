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

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ivc/geometry.hpp"
#include "ivc/mfs.hpp"
#include "ivc/mobility.hpp"
#include "ivc/roadnet.hpp"

namespace ivc {

/// Statute mile in meters; "one mile ahead" queries use it.
inline constexpr double kMileMeters = 1609.344;

/// Issues "<prefix>-<n>" ids, n starting at 1.
class IdSequence {
 public:
  explicit IdSequence(std::string prefix) : prefix_(std::move(prefix)) {}
  std::string next() { return prefix_ + "-" + std::to_string(++n_); }

 private:
  std::string prefix_;
  std::uint64_t n_ = 0;
};

/// Daily clock window. start > end wraps past midnight; start == end is
/// rejected.
struct TimeWindow {
  WallTime start;
  WallTime end;

  /// "HHMMSS-HHMMSS". Throws ParseError.
  static TimeWindow parse(std::string_view text);
  bool wraps() const { return start > end; }
  /// Half-open [start, end).
  bool contains(double seconds_of_day) const;
};

struct UserRecord {
  std::string username;
  std::string code;
  std::vector<TimeWindow> schedule;
  std::map<std::string, std::string> profile;
};

struct ServiceDef {
  std::string id;
  Point position;
  std::string description;
};

struct TimeRule {
  enum class Kind { kWithinSchedule, kWindows, kAlways };
  Kind kind = Kind::kWithinSchedule;
  std::vector<TimeWindow> windows;
};

struct Policy {
  std::string service_id;
  std::optional<std::set<std::string>> allowed_users;  // nullopt: anyone authenticated
  TimeRule time_rule;
  std::optional<double> max_distance;    // meters from the service position
  std::set<SegmentLocator> segments;     // empty: no segment restriction
};

enum class DenyReason { kAuthentication, kUser, kLocation, kTime };
std::string_view to_string(DenyReason r);

struct AccessVerdict {
  bool granted = false;
  std::optional<DenyReason> reason;  // set iff denied
  std::string policy_service;
};

struct FacilityAdvertisement {
  std::string service_type;
  std::string address;
  std::vector<std::pair<std::string, double>> prices;
  Point position;
  SegmentLocator segment;
};

struct AlertRecord {
  Message message;
  double stored_at = 0.0;
  double rebroadcast_interval = 0.0;
  double next_broadcast = 0.0;
};

struct SensorSnapshot {
  std::string vehicle_id;
  double time = 0.0;
  double speed = 0.0;
  Point position;
  SegmentLocator segment;
};

/// A vehicle a base station can currently see.
struct VisibleVehicle {
  std::string vehicle_id;
  Pose pose;
};

struct StationConfig {
  std::string station_id;
  Point position;
  double coverage_radius = 150.0;
  std::vector<SegmentLocator> covered_segments;
  double alert_interval = 600.0;
  std::vector<UserRecord> users;
  std::vector<ServiceDef> services;
  std::vector<Policy> policies;
  std::vector<FacilityAdvertisement> facilities;
};

/// Throws ValidationError on broken cross references.
void validate_station(const StationConfig& cfg, const RoadNetwork& net);

enum class IngestResult { kStored, kBroadcastOnly, kDuplicate, kDroppedExpired };

// Roadside server: location updater, service provider, access control engine
// and temporal alert repository for one station.
class BaseStation {
 public:
  BaseStation(StationConfig cfg, const RoadNetwork& net);

  const std::string& id() const { return cfg_.station_id; }
  const StationConfig& config() const { return cfg_; }
  const Point& position() const { return cfg_.position; }
  double coverage_radius() const { return cfg_.coverage_radius; }
  bool covers(const Point& p) const { return distance(p, cfg_.position) <= cfg_.coverage_radius; }
  bool covers_segment(const SegmentLocator& loc) const;
  /// Locator used as msg_source for station-originated messages.
  const SegmentLocator& home_segment() const { return cfg_.covered_segments.front(); }

  /// One "location-update" service message per vehicle whose segment changed
  /// since the last tick, in vehicle id order.
  std::vector<Message> location_updater_tick(std::span<const VisibleVehicle> visible, double wall_seconds);

  /// One "id-request" per vehicle that just entered coverage. Vehicles that
  /// left end their visit and lose any session.
  std::vector<Message> service_provider_tick(std::span<const VisibleVehicle> visible, double wall_seconds);

  bool authenticate(const std::string& username, const std::string& code) const;
  /// Authenticates and, on success, opens a session for the vehicle.
  bool open_session(const std::string& vehicle_id, const std::string& username, const std::string& code);
  std::optional<std::string> session_user(const std::string& vehicle_id) const;
  bool has_session(const std::string& username) const;

  /// Throws LookupError for an unknown service.
  AccessVerdict access_decision(const std::string& username, const std::string& service_id,
                                const Point& requester_position, const std::optional<SegmentLocator>& requester_segment,
                                double wall_seconds) const;

  /// Services this user would be granted right now; no side effects.
  std::vector<std::string> context_services(const std::string& username, const Point& position,
                                            const std::optional<SegmentLocator>& segment, double wall_seconds) const;

  /// Call with an alert addressed to this station. Returns what happened; the
  /// caller broadcasts `msg` immediately for kStored and kBroadcastOnly.
  IngestResult alert_ingest(const Message& msg, double now, double wall_seconds);
  /// Periodic rebroadcasts due at `now`; purges expired records.
  std::vector<Message> due_alert_broadcasts(double now, double wall_seconds);
  std::optional<double> next_alert_time() const;
  /// Drops expired records; returns how many went.
  std::size_t purge_expired_alerts(double wall_seconds);
  const std::map<std::string, AlertRecord>& temporal_alerts() const { return alerts_; }
  std::size_t expired_on_arrival() const { return expired_on_arrival_; }

  IdSequence& ids() { return ids_; }

 private:
  Message make_service_message(const SegmentLocator& target, std::string body, double wall_seconds);
  const Policy* policy_for(const std::string& service_id) const;
  const UserRecord* user(const std::string& username) const;

  StationConfig cfg_;
  IdSequence ids_;
  std::map<std::string, SegmentLocator> last_segment_;
  std::set<std::string> visiting_;
  std::map<std::string, std::string> sessions_;  // vehicle -> username
  std::map<std::string, AlertRecord> alerts_;
  std::set<std::string> alert_ids_;
  std::size_t expired_on_arrival_ = 0;
};

// -- Query resolution -------------------------------------------------------------

struct TrafficParams {
  double window = 60.0;                  // s
  double speed_threshold = 30.0 / 3.6;   // m/s
  double density_threshold = 50.0;       // vehicles per km
};

struct TrafficReply {
  std::optional<double> avg_speed;  // m/s; undefined on an empty segment
  double density = 0.0;             // vehicles per km
  bool congested = false;
  std::size_t samples = 0;
  std::size_t vehicles = 0;
};

/// Mean speed over snapshots on `target` with time in [now - W, now];
/// density counts distinct vehicles per km of segment.
TrafficReply resolve_traffic_query(std::span<const SensorSnapshot> snapshots, const SegmentLocator& target,
                                   double segment_length, double now, const TrafficParams& params);

std::string format_traffic_reply(const TrafficReply& reply);
/// Throws ParseError.
TrafficReply parse_traffic_reply(std::string_view body);

/// Advertisements of `service_type` on the route, nearest along the route
/// first.
std::vector<FacilityAdvertisement> resolve_facility_query(std::span<const FacilityAdvertisement> ads,
                                                          const std::vector<SegmentLocator>& route_segments,
                                                          const std::string& service_type, const RoadNetwork& net);

/// ODI samples at multiples of `interval` inside [from, to], skipping times
/// outside the vehicle's active window.
std::vector<SensorSnapshot> sample_snapshots(const VehicleTrajectory& traj, const RoadNetwork& net, double from,
                                             double to, double interval);

struct UserRequest {
  SegmentLocator destination;
  std::vector<std::string> interests;  // facility types, e.g. "coffee"
};

struct QueryOptions {
  std::size_t routes = 2;
  std::optional<std::uint64_t> expire = 300;
  std::optional<std::uint64_t> count;
};

/// One traffic query per segment on the candidate routes plus one facility
/// query per (segment, interest). Throws LookupError when unroutable.
std::vector<Message> originate_user_query(const std::string& vehicle_id, const Pose& pose, const UserRequest& request,
                                          const RoadNetwork& net, double wall_seconds, const QueryOptions& opts,
                                          IdSequence& ids);

/// Segment containing the point `distance` meters further along the plan.
/// Throws LookupError when the plan ends first.
SegmentLocator segment_ahead(const VehicleTrajectory& traj, const RoadNetwork& net, double t, double distance);

/// Body key/value helpers: "kind;k=v;k=v".
std::string body_kind(std::string_view body);
std::optional<std::string> body_field(std::string_view body, std::string_view key);

}  // namespace ivc
