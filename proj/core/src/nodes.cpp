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

#include "ivc/nodes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "ivc/error.hpp"

namespace ivc {

namespace {

WallTime wall_of(double wall_seconds) {
  return WallTime::from_seconds(static_cast<std::int64_t>(std::floor(wall_seconds)));
}

double parse_double(std::string_view text, std::string_view what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("reply: bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

// -- TimeWindow -----------------------------------------------------------------

TimeWindow TimeWindow::parse(std::string_view text) {
  const auto dash = text.find('-');
  if (dash == std::string_view::npos) {
    throw ParseError("time window '" + std::string(text) + "': expected HHMMSS-HHMMSS");
  }
  TimeWindow w{WallTime::parse(text.substr(0, dash)), WallTime::parse(text.substr(dash + 1))};
  if (w.start == w.end) throw ParseError("time window '" + std::string(text) + "' is empty");
  return w;
}

bool TimeWindow::contains(double seconds_of_day) const {
  const double s = static_cast<double>(start.seconds_of_day());
  const double e = static_cast<double>(end.seconds_of_day());
  if (!wraps()) return seconds_of_day >= s && seconds_of_day < e;
  return seconds_of_day >= s || seconds_of_day < e;
}

std::string_view to_string(DenyReason r) {
  switch (r) {
    case DenyReason::kAuthentication:
      return "auth";
    case DenyReason::kUser:
      return "user";
    case DenyReason::kLocation:
      return "location";
    case DenyReason::kTime:
      return "time";
  }
  return "auth";
}

// -- Station --------------------------------------------------------------------

void validate_station(const StationConfig& cfg, const RoadNetwork& net) {
  const std::string who = "station '" + cfg.station_id + "'";
  if (!is_message_token(cfg.station_id)) throw ValidationError("station id must be a non-empty token");
  if (!(cfg.coverage_radius > 0.0)) throw ValidationError(who + ": coverage_radius must be > 0");
  if (!(cfg.alert_interval > 0.0)) throw ValidationError(who + ": alert_interval must be > 0");
  if (cfg.covered_segments.empty()) throw ValidationError(who + ": needs at least one covered segment");
  for (const auto& loc : cfg.covered_segments) {
    if (!net.contains(loc)) throw ValidationError(who + ": covered segment " + format_locator(loc) + " does not resolve");
  }
  std::set<std::string> names;
  for (const auto& u : cfg.users) {
    if (!names.insert(u.username).second) throw ValidationError(who + ": duplicate user '" + u.username + "'");
  }
  std::set<std::string> services;
  for (const auto& s : cfg.services) {
    if (!services.insert(s.id).second) throw ValidationError(who + ": duplicate service '" + s.id + "'");
  }
  for (const auto& p : cfg.policies) {
    if (!services.count(p.service_id)) {
      throw ValidationError(who + ": policy names unknown service '" + p.service_id + "'");
    }
    if (p.max_distance && !(*p.max_distance > 0.0)) {
      throw ValidationError(who + ": policy for '" + p.service_id + "' has non-positive max_distance");
    }
    for (const auto& loc : p.segments) {
      if (!net.contains(loc)) {
        throw ValidationError(who + ": policy segment " + format_locator(loc) + " does not resolve");
      }
    }
  }
  for (const auto& f : cfg.facilities) {
    if (!net.contains(f.segment)) {
      throw ValidationError(who + ": facility segment " + format_locator(f.segment) + " does not resolve");
    }
    if (distance_to_polyline(f.position, net.resolve(f.segment).polyline()) > 50.0) {
      throw ValidationError(who + ": facility '" + f.address + "' is more than 50 m from its segment");
    }
  }
}

BaseStation::BaseStation(StationConfig cfg, const RoadNetwork& net) : cfg_(std::move(cfg)), ids_(cfg_.station_id) {
  validate_station(cfg_, net);
}

bool BaseStation::covers_segment(const SegmentLocator& loc) const {
  return std::find(cfg_.covered_segments.begin(), cfg_.covered_segments.end(), loc) != cfg_.covered_segments.end();
}

Message BaseStation::make_service_message(const SegmentLocator& target, std::string body, double wall_seconds) {
  Message m;
  m.type = MsgType::kService;
  m.target = target;
  m.id = ids_.next();
  m.source = home_segment();
  m.creator = cfg_.station_id;
  m.time = wall_of(wall_seconds);
  m.body = std::move(body);
  return m;
}

std::vector<Message> BaseStation::location_updater_tick(std::span<const VisibleVehicle> visible, double wall_seconds) {
  std::vector<const VisibleVehicle*> order;
  for (const auto& v : visible) order.push_back(&v);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->vehicle_id < b->vehicle_id; });
  std::vector<Message> out;
  for (const auto* v : order) {
    auto it = last_segment_.find(v->vehicle_id);
    if (it != last_segment_.end() && it->second == v->pose.segment) continue;
    last_segment_[v->vehicle_id] = v->pose.segment;
    out.push_back(make_service_message(
        v->pose.segment, "location-update;vehicle=" + v->vehicle_id + ";segment=" + format_locator(v->pose.segment),
        wall_seconds));
  }
  return out;
}

std::vector<Message> BaseStation::service_provider_tick(std::span<const VisibleVehicle> visible, double wall_seconds) {
  std::set<std::string> now_visible;
  std::map<std::string, const VisibleVehicle*> by_id;
  for (const auto& v : visible) {
    now_visible.insert(v.vehicle_id);
    by_id[v.vehicle_id] = &v;
  }
  for (auto it = visiting_.begin(); it != visiting_.end();) {
    if (!now_visible.count(*it)) {
      sessions_.erase(*it);
      it = visiting_.erase(it);
    } else {
      ++it;
    }
  }
  std::vector<Message> out;
  for (const auto& [vid, v] : by_id) {
    if (!visiting_.insert(vid).second) continue;
    out.push_back(make_service_message(v->pose.segment, "id-request;vehicle=" + vid, wall_seconds));
  }
  return out;
}

const UserRecord* BaseStation::user(const std::string& username) const {
  for (const auto& u : cfg_.users) {
    if (u.username == username) return &u;
  }
  return nullptr;
}

bool BaseStation::authenticate(const std::string& username, const std::string& code) const {
  const UserRecord* u = user(username);
  return u != nullptr && u->code == code;
}

bool BaseStation::open_session(const std::string& vehicle_id, const std::string& username, const std::string& code) {
  if (!authenticate(username, code)) return false;
  sessions_[vehicle_id] = username;
  return true;
}

std::optional<std::string> BaseStation::session_user(const std::string& vehicle_id) const {
  const auto it = sessions_.find(vehicle_id);
  if (it == sessions_.end()) return std::nullopt;
  return it->second;
}

bool BaseStation::has_session(const std::string& username) const {
  return std::any_of(sessions_.begin(), sessions_.end(), [&](const auto& s) { return s.second == username; });
}

const Policy* BaseStation::policy_for(const std::string& service_id) const {
  for (const auto& p : cfg_.policies) {
    if (p.service_id == service_id) return &p;
  }
  return nullptr;
}

AccessVerdict BaseStation::access_decision(const std::string& username, const std::string& service_id,
                                           const Point& requester_position,
                                           const std::optional<SegmentLocator>& requester_segment,
                                           double wall_seconds) const {
  const auto service = std::find_if(cfg_.services.begin(), cfg_.services.end(),
                                    [&](const ServiceDef& s) { return s.id == service_id; });
  if (service == cfg_.services.end()) {
    throw LookupError("station '" + cfg_.station_id + "': unknown service '" + service_id + "'");
  }
  AccessVerdict v;
  v.policy_service = service_id;
  auto deny = [&](DenyReason r) {
    v.granted = false;
    v.reason = r;
    return v;
  };
  const Policy* policy = policy_for(service_id);
  if (!has_session(username)) return deny(DenyReason::kAuthentication);
  if (policy == nullptr) return deny(DenyReason::kUser);  // no policy grants nothing
  if (policy->allowed_users && !policy->allowed_users->count(username)) return deny(DenyReason::kUser);

  if (policy->max_distance && distance(requester_position, service->position) > *policy->max_distance) {
    return deny(DenyReason::kLocation);
  }
  if (!policy->segments.empty() && (!requester_segment || !policy->segments.count(*requester_segment))) {
    return deny(DenyReason::kLocation);
  }

  const double sod = std::fmod(wall_seconds, static_cast<double>(WallTime::kSecondsPerDay));
  bool in_time = false;
  switch (policy->time_rule.kind) {
    case TimeRule::Kind::kAlways:
      in_time = true;
      break;
    case TimeRule::Kind::kWindows:
      in_time = std::any_of(policy->time_rule.windows.begin(), policy->time_rule.windows.end(),
                            [&](const TimeWindow& w) { return w.contains(sod); });
      break;
    case TimeRule::Kind::kWithinSchedule: {
      const UserRecord* u = user(username);
      in_time = u != nullptr && std::any_of(u->schedule.begin(), u->schedule.end(),
                                            [&](const TimeWindow& w) { return w.contains(sod); });
      break;
    }
  }
  if (!in_time) return deny(DenyReason::kTime);
  v.granted = true;
  return v;
}

std::vector<std::string> BaseStation::context_services(const std::string& username, const Point& position,
                                                       const std::optional<SegmentLocator>& segment,
                                                       double wall_seconds) const {
  std::vector<std::string> out;
  for (const auto& s : cfg_.services) {
    if (access_decision(username, s.id, position, segment, wall_seconds).granted) out.push_back(s.id);
  }
  return out;
}

IngestResult BaseStation::alert_ingest(const Message& msg, double now, double wall_seconds) {
  if (msg.type != MsgType::kAlert) {
    throw DomainError("alert_ingest: message '" + msg.id + "' is not an alert");
  }
  if (alert_ids_.count(msg.id)) return IngestResult::kDuplicate;
  if (is_expired(msg, wall_seconds)) {
    ++expired_on_arrival_;
    return IngestResult::kDroppedExpired;
  }
  alert_ids_.insert(msg.id);
  if (!msg.expire) return IngestResult::kBroadcastOnly;
  alerts_.emplace(msg.id, AlertRecord{msg, now, cfg_.alert_interval, now + cfg_.alert_interval});
  return IngestResult::kStored;
}

std::vector<Message> BaseStation::due_alert_broadcasts(double now, double wall_seconds) {
  std::vector<Message> out;
  for (auto it = alerts_.begin(); it != alerts_.end();) {
    AlertRecord& rec = it->second;
    if (is_expired(rec.message, wall_seconds)) {
      it = alerts_.erase(it);
      continue;
    }
    if (rec.next_broadcast <= now + 1e-9) {
      out.push_back(rec.message);
      rec.next_broadcast += rec.rebroadcast_interval;
    }
    ++it;
  }
  return out;
}

std::size_t BaseStation::purge_expired_alerts(double wall_seconds) {
  return std::erase_if(alerts_, [&](const auto& kv) { return is_expired(kv.second.message, wall_seconds); });
}

std::optional<double> BaseStation::next_alert_time() const {
  std::optional<double> next;
  for (const auto& [id, rec] : alerts_) {
    if (!next || rec.next_broadcast < *next) next = rec.next_broadcast;
  }
  return next;
}

// -- Query resolution -------------------------------------------------------------

TrafficReply resolve_traffic_query(std::span<const SensorSnapshot> snapshots, const SegmentLocator& target,
                                   double segment_length, double now, const TrafficParams& params) {
  if (!(params.window > 0.0)) throw DomainError("resolve_traffic_query: window must be > 0");
  if (!(segment_length > 0.0)) throw DomainError("resolve_traffic_query: segment length must be > 0");
  TrafficReply reply;
  double sum = 0.0;
  std::set<std::string> vehicles;
  const double from = now - params.window;
  for (const auto& s : snapshots) {
    if (s.segment != target || s.time < from - 1e-9 || s.time > now + 1e-9) continue;
    sum += s.speed;
    ++reply.samples;
    vehicles.insert(s.vehicle_id);
  }
  reply.vehicles = vehicles.size();
  reply.density = static_cast<double>(vehicles.size()) / (segment_length / 1000.0);
  if (reply.samples > 0) reply.avg_speed = sum / static_cast<double>(reply.samples);
  // Empty segment: nothing to call congested.
  if (reply.samples > 0) {
    reply.congested = *reply.avg_speed < params.speed_threshold || reply.density > params.density_threshold;
  }
  return reply;
}

std::string format_traffic_reply(const TrafficReply& r) {
  return fmt::format("traffic;avg_speed={};density={};congested={};samples={};vehicles={}",
                     r.avg_speed ? fmt::format("{}", *r.avg_speed) : std::string("NULL"), r.density,
                     r.congested ? 1 : 0, r.samples, r.vehicles);
}

TrafficReply parse_traffic_reply(std::string_view body) {
  // Accept the bare payload or a routed reply wrapping it.
  if (body_kind(body) == "reply") {
    const auto at = body.find(";traffic;");
    if (at == std::string_view::npos) throw ParseError("reply: not a traffic reply");
    body = body.substr(at + 1);
  }
  if (body_kind(body) != "traffic") throw ParseError("reply: not a traffic reply");
  auto need = [&](std::string_view key) {
    auto v = body_field(body, key);
    if (!v) throw ParseError("reply: missing '" + std::string(key) + "'");
    return *v;
  };
  TrafficReply r;
  const auto avg = need("avg_speed");
  if (avg != "NULL") r.avg_speed = parse_double(avg, "avg_speed");
  r.density = parse_double(need("density"), "density");
  r.congested = need("congested") == "1";
  r.samples = static_cast<std::size_t>(parse_double(need("samples"), "samples"));
  r.vehicles = static_cast<std::size_t>(parse_double(need("vehicles"), "vehicles"));
  return r;
}

std::vector<FacilityAdvertisement> resolve_facility_query(std::span<const FacilityAdvertisement> ads,
                                                          const std::vector<SegmentLocator>& route_segments,
                                                          const std::string& service_type, const RoadNetwork& net) {
  if (route_segments.empty()) throw DomainError("resolve_facility_query: route is empty");
  std::vector<std::pair<double, const FacilityAdvertisement*>> hits;
  for (const auto& ad : ads) {
    if (ad.service_type != service_type) continue;
    double before = 0.0;
    for (const auto& loc : route_segments) {
      const Segment& seg = net.resolve(loc);
      if (loc == ad.segment) {
        hits.emplace_back(before + seg.project(ad.position), &ad);
        break;
      }
      before += seg.length();
    }
  }
  std::stable_sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second->address < b.second->address;
  });
  std::vector<FacilityAdvertisement> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back(*h.second);
  return out;
}

std::vector<SensorSnapshot> sample_snapshots(const VehicleTrajectory& traj, const RoadNetwork& net, double from,
                                             double to, double interval) {
  std::vector<SensorSnapshot> out;
  if (!(interval > 0.0) || to < from) return out;
  const TimeInterval active = active_interval(traj, net);
  const auto k0 = static_cast<std::int64_t>(std::ceil(from / interval - 1e-9));
  const auto k1 = static_cast<std::int64_t>(std::floor(to / interval + 1e-9));
  for (std::int64_t k = k0; k <= k1; ++k) {
    const double t = static_cast<double>(k) * interval;
    if (t < active.begin || t > active.end) continue;
    const Pose p = pose_at(traj, net, t);
    out.push_back({traj.vehicle_id, t, p.speed, p.position, p.segment});
  }
  return out;
}

std::vector<Message> originate_user_query(const std::string& vehicle_id, const Pose& pose, const UserRequest& request,
                                          const RoadNetwork& net, double wall_seconds, const QueryOptions& opts,
                                          IdSequence& ids) {
  const auto routes = net.routes_between(pose.segment, request.destination, std::max<std::size_t>(1, opts.routes));
  if (routes.empty()) {
    throw LookupError("no route from " + format_locator(pose.segment) + " to " +
                      format_locator(request.destination));
  }
  std::vector<SegmentLocator> segments;
  for (const auto& r : routes) {
    for (const auto& s : r.segments) {
      if (std::find(segments.begin(), segments.end(), s) == segments.end()) segments.push_back(s);
    }
  }
  std::vector<Message> out;
  auto make = [&](const SegmentLocator& target, std::string body) {
    Message m;
    m.type = MsgType::kQuery;
    m.target = target;
    m.id = ids.next();
    m.source = pose.segment;
    m.creator = vehicle_id;
    m.time = wall_of(wall_seconds);
    m.expire = opts.expire;
    m.count = opts.count;
    m.body = std::move(body);
    out.push_back(std::move(m));
  };
  for (const auto& s : segments) {
    make(s, "traffic");
    for (const auto& interest : request.interests) make(s, "facility;type=" + interest);
  }
  return out;
}

SegmentLocator segment_ahead(const VehicleTrajectory& traj, const RoadNetwork& net, double t, double dist) {
  const Pose here = pose_at(traj, net, t);
  // Latest leg on the current segment that has already started.
  auto leg = traj.plan.end();
  for (auto it = traj.plan.begin(); it != traj.plan.end(); ++it) {
    if (it->segment == here.segment && it->entry_time <= t + 1e-9) leg = it;
  }
  if (leg == traj.plan.end()) throw LookupError("vehicle '" + traj.vehicle_id + "': no active leg");
  double remaining = dist;
  double offset = here.offset;
  for (auto it = leg; it != traj.plan.end(); ++it) {
    const double len = net.resolve(it->segment).length();
    if (remaining < len - offset) return it->segment;
    remaining -= len - offset;
    offset = 0.0;
  }
  throw LookupError("vehicle '" + traj.vehicle_id + "': plan ends less than " + std::to_string(dist) +
                    " m ahead");
}

std::string body_kind(std::string_view body) {
  return std::string(body.substr(0, body.find(';')));
}

std::optional<std::string> body_field(std::string_view body, std::string_view key) {
  std::size_t pos = body.find(';');
  while (pos != std::string_view::npos) {
    const std::size_t start = pos + 1;
    const std::size_t end = body.find(';', start);
    const auto item = body.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    const auto eq = item.find('=');
    if (eq != std::string_view::npos && item.substr(0, eq) == key) return std::string(item.substr(eq + 1));
    pos = end;
  }
  return std::nullopt;
}

}  // namespace ivc
