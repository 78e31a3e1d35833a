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

#include "ivc/scenario_io.hpp"

#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "ivc/error.hpp"

namespace ivc {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LookupError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& what) const {
    const auto mark = at.Mark();
    if (mark.line >= 0) throw ValidationError(fmt::format("{}:{}: {}", origin_, mark.line + 1, what));
    throw ValidationError(fmt::format("{}: {}", origin_, what));
  }

  void keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed, std::string_view ctx) const {
    if (!map.IsMap()) fail(map, std::string(ctx) + " must be a mapping");
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail(kv.first, fmt::format("unknown key '{}' in {}", key, ctx));
      }
    }
  }

  const YAML::Node need(const YAML::Node& map, const char* key, std::string_view ctx) const {
    const YAML::Node n = map[key];
    if (!n) fail(map, fmt::format("{} needs '{}'", ctx, key));
    return n;
  }

  template <typename T>
  T as(const YAML::Node& n, std::string_view what) const {
    if (!n.IsScalar()) fail(n, std::string(what) + " must be a scalar");
    try {
      return n.as<T>();
    } catch (const YAML::BadConversion&) {
      fail(n, fmt::format("{}: cannot read '{}'", what, n.Scalar()));
    }
  }

  template <typename T>
  T get(const YAML::Node& map, const char* key, T fallback) const {
    const YAML::Node n = map[key];
    return n ? as<T>(n, key) : fallback;
  }

  template <typename T>
  std::optional<T> opt(const YAML::Node& map, const char* key) const {
    const YAML::Node n = map[key];
    if (!n || (n.IsScalar() && n.Scalar() == "NULL") || n.IsNull()) return std::nullopt;
    return as<T>(n, key);
  }

  Point point(const YAML::Node& n, std::string_view what) const {
    if (!n.IsSequence() || n.size() != 2) fail(n, std::string(what) + " must be [x, y]");
    return {as<double>(n[0], what), as<double>(n[1], what)};
  }

  SegmentLocator locator(const YAML::Node& n, std::string_view what) const {
    const auto text = as<std::string>(n, what);
    try {
      return parse_locator(text);
    } catch (const ParseError& e) {
      fail(n, fmt::format("{}: {}", what, e.what()));
    }
  }

  std::vector<SegmentLocator> locators(const YAML::Node& n, std::string_view what) const {
    if (!n.IsSequence()) fail(n, std::string(what) + " must be a list of locators");
    std::vector<SegmentLocator> out;
    for (const auto& item : n) out.push_back(locator(item, what));
    return out;
  }

  TimeWindow window(const YAML::Node& n) const {
    try {
      return TimeWindow::parse(as<std::string>(n, "time window"));
    } catch (const Error& e) {
      fail(n, e.what());
    }
  }

  std::vector<TimeWindow> windows(const YAML::Node& n) const {
    if (!n.IsSequence()) fail(n, "schedule must be a list of HHMMSS-HHMMSS windows");
    std::vector<TimeWindow> out;
    for (const auto& w : n) out.push_back(window(w));
    return out;
  }

  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
};

YAML::Node load_yaml(std::string_view text, const std::string& origin) {
  try {
    return YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ParseError(fmt::format("{}:{}: {}", origin, e.mark.line + 1, e.msg));
  }
}

// -- network ----------------------------------------------------------------------

Road read_road(const Reader& rd, const YAML::Node& n) {
  rd.keys(n, {"id", "name", "segments", "chain"}, "road");
  Road road;
  road.road_id = rd.as<std::int64_t>(rd.need(n, "id", "road"), "road id");
  road.name = rd.as<std::string>(rd.need(n, "name", "road"), "road name");
  if (!is_road_name_token(road.name)) rd.fail(n["name"], "road name '" + road.name + "' must match [a-z0-9_]+");
  const auto build = [&](const YAML::Node& at, std::int64_t id, std::vector<Point> pts) {
    try {
      road.segments.emplace_back(id, std::move(pts));
    } catch (const Error& e) {
      rd.fail(at, e.what());
    }
  };
  if (const auto segs = n["segments"]) {
    if (!segs.IsSequence()) rd.fail(segs, "segments must be a list");
    for (const auto& s : segs) {
      rd.keys(s, {"id", "points"}, "segment");
      const auto pts_node = rd.need(s, "points", "segment");
      if (!pts_node.IsSequence()) rd.fail(pts_node, "points must be a list of [x, y]");
      std::vector<Point> pts;
      for (const auto& p : pts_node) pts.push_back(rd.point(p, "point"));
      build(s, rd.as<std::int64_t>(rd.need(s, "id", "segment"), "segment id"), std::move(pts));
    }
  }
  if (const auto chain = n["chain"]) {
    // Straight run of equal segments: start, unit direction, length, count.
    rd.keys(chain, {"start", "direction", "segment_length", "count", "first_id"}, "chain");
    const Point start = rd.point(rd.need(chain, "start", "chain"), "chain start");
    const Point dir_pt = rd.point(rd.need(chain, "direction", "chain"), "chain direction");
    const double len = rd.as<double>(rd.need(chain, "segment_length", "chain"), "segment_length");
    const auto count = rd.as<std::int64_t>(rd.need(chain, "count", "chain"), "count");
    const auto first = rd.get<std::int64_t>(chain, "first_id", 1);
    const Vec2 d{dir_pt.x, dir_pt.y};
    const double dn = norm(d);
    if (!(dn > 0.0)) rd.fail(chain, "chain direction must be non-zero");
    if (!(len > 0.0) || count < 1) rd.fail(chain, "chain needs segment_length > 0 and count >= 1");
    const Vec2 u{d.x / dn, d.y / dn};
    for (std::int64_t k = 0; k < count; ++k) {
      const Point a = start + (static_cast<double>(k) * len) * u;
      const Point b = start + (static_cast<double>(k + 1) * len) * u;
      build(chain, first + k, {a, b});
    }
  }
  if (road.segments.empty()) rd.fail(n, "road '" + road.name + "' has no segments");
  return road;
}

RoadNetwork read_network(const Reader& rd, const YAML::Node& root) {
  rd.keys(root, {"roads"}, "network");
  const auto roads = rd.need(root, "roads", "network");
  if (!roads.IsSequence()) rd.fail(roads, "roads must be a list");
  std::vector<Road> out;
  for (const auto& r : roads) out.push_back(read_road(rd, r));
  try {
    return RoadNetwork(std::move(out));
  } catch (const Error& e) {
    rd.fail(roads, e.what());
  }
}

// -- scenario -----------------------------------------------------------------------

double read_speed(const Reader& rd, const YAML::Node& n, std::string_view ctx) {
  const bool kmh = static_cast<bool>(n["speed_kmh"]);
  const bool ms = static_cast<bool>(n["speed"]);
  if (kmh == ms) rd.fail(n, std::string(ctx) + " needs exactly one of 'speed' (m/s) or 'speed_kmh'");
  return kmh ? kmh_to_ms(rd.as<double>(n["speed_kmh"], "speed_kmh")) : rd.as<double>(n["speed"], "speed");
}

std::optional<Credentials> read_credentials(const Reader& rd, const YAML::Node& n) {
  if (!n) return std::nullopt;
  rd.keys(n, {"username", "code"}, "user");
  return Credentials{rd.as<std::string>(rd.need(n, "username", "user"), "username"),
                     rd.as<std::string>(rd.need(n, "code", "user"), "code")};
}

VehicleSpec read_vehicle(const Reader& rd, const YAML::Node& n, const RoadNetwork& net) {
  rd.keys(n, {"id", "route", "start_time", "speed", "speed_kmh", "start_offset", "plan", "user", "auto_accept_offers"},
          "vehicle");
  VehicleSpec v;
  const auto id = rd.as<std::string>(rd.need(n, "id", "vehicle"), "vehicle id");
  v.user = read_credentials(rd, n["user"]);
  v.auto_accept_offers = rd.get<bool>(n, "auto_accept_offers", true);
  if (n["plan"]) {
    if (n["route"]) rd.fail(n, "vehicle '" + id + "': give either 'route' or 'plan', not both");
    const auto plan = n["plan"];
    if (!plan.IsSequence()) rd.fail(plan, "plan must be a list of legs");
    v.trajectory.vehicle_id = id;
    for (const auto& leg : plan) {
      rd.keys(leg, {"segment", "entry_time", "speed", "speed_kmh", "entry_offset"}, "plan leg");
      v.trajectory.plan.push_back({rd.locator(rd.need(leg, "segment", "plan leg"), "segment"),
                                   rd.as<double>(rd.need(leg, "entry_time", "plan leg"), "entry_time"),
                                   read_speed(rd, leg, "plan leg"), rd.get<double>(leg, "entry_offset", 0.0)});
    }
    return v;
  }
  const auto route = rd.locators(rd.need(n, "route", "vehicle"), "route");
  if (route.empty()) rd.fail(n, "vehicle '" + id + "': route is empty");
  for (const auto& loc : route) {
    if (!net.contains(loc)) rd.fail(n["route"], "vehicle '" + id + "': " + format_locator(loc) + " does not resolve");
  }
  v.trajectory = make_trajectory(id, route, rd.get<double>(n, "start_time", 0.0), read_speed(rd, n, "vehicle"), net,
                                 rd.get<double>(n, "start_offset", 0.0));
  return v;
}

// Evenly spaced column of vehicles on one route; member 1 leads.
std::vector<VehicleSpec> read_convoy(const Reader& rd, const YAML::Node& n, const RoadNetwork& net) {
  rd.keys(n, {"prefix", "count", "route", "start_time", "lead_offset", "spacing", "speed", "speed_kmh", "speeds",
              "user_code"},
          "convoy");
  const auto prefix = rd.as<std::string>(rd.need(n, "prefix", "convoy"), "prefix");
  const auto count = rd.as<int>(rd.need(n, "count", "convoy"), "count");
  if (count < 1) rd.fail(n, "convoy count must be >= 1");
  const auto route = rd.locators(rd.need(n, "route", "convoy"), "route");
  for (const auto& loc : route) {
    if (!net.contains(loc)) rd.fail(n["route"], "convoy '" + prefix + "': " + format_locator(loc) + " does not resolve");
  }
  const double lead = rd.get<double>(n, "lead_offset", 0.0);
  const double spacing = rd.as<double>(rd.need(n, "spacing", "convoy"), "spacing");
  const double start = rd.get<double>(n, "start_time", 0.0);
  std::vector<double> speeds;
  if (const auto list = n["speeds"]) {
    if (!list.IsSequence() || list.size() == 0) rd.fail(list, "speeds must be a non-empty list of m/s values");
    for (const auto& s : list) speeds.push_back(rd.as<double>(s, "speeds"));
  } else {
    speeds.push_back(read_speed(rd, n, "convoy"));
  }
  std::vector<VehicleSpec> out;
  for (int k = 0; k < count; ++k) {
    const double offset = lead - spacing * k;
    if (offset < 0.0) rd.fail(n, fmt::format("convoy '{}': member {} would start before the route", prefix, k + 1));
    VehicleSpec v;
    v.trajectory = make_trajectory(fmt::format("{}{}", prefix, k + 1), route, start,
                                   speeds[static_cast<std::size_t>(k) % speeds.size()], net, offset);
    out.push_back(std::move(v));
  }
  return out;
}

TimeRule read_time_rule(const Reader& rd, const YAML::Node& n) {
  TimeRule rule;
  if (!n) return rule;
  if (n.IsScalar()) {
    const auto s = n.Scalar();
    if (s == "within_schedule") return rule;
    if (s == "always") {
      rule.kind = TimeRule::Kind::kAlways;
      return rule;
    }
    rd.fail(n, "time must be within_schedule, always or a list of windows");
  }
  rule.kind = TimeRule::Kind::kWindows;
  rule.windows = rd.windows(n);
  return rule;
}

StationConfig read_station(const Reader& rd, const YAML::Node& n) {
  rd.keys(n, {"id", "position", "coverage_radius", "segments", "alert_interval", "users", "services", "policies",
              "facilities"},
          "station");
  StationConfig s;
  s.station_id = rd.as<std::string>(rd.need(n, "id", "station"), "station id");
  s.position = rd.point(rd.need(n, "position", "station"), "position");
  s.coverage_radius = rd.get<double>(n, "coverage_radius", s.coverage_radius);
  s.covered_segments = rd.locators(rd.need(n, "segments", "station"), "segments");
  s.alert_interval = rd.get<double>(n, "alert_interval", s.alert_interval);
  for (const auto& u : n["users"]) {
    rd.keys(u, {"username", "code", "schedule", "profile"}, "user");
    UserRecord rec;
    rec.username = rd.as<std::string>(rd.need(u, "username", "user"), "username");
    rec.code = rd.as<std::string>(rd.need(u, "code", "user"), "code");
    if (u["schedule"]) rec.schedule = rd.windows(u["schedule"]);
    for (const auto& kv : u["profile"]) {
      rec.profile[kv.first.as<std::string>()] = rd.as<std::string>(kv.second, "profile value");
    }
    s.users.push_back(std::move(rec));
  }
  for (const auto& d : n["services"]) {
    rd.keys(d, {"id", "position", "description"}, "service");
    s.services.push_back({rd.as<std::string>(rd.need(d, "id", "service"), "service id"),
                          rd.point(rd.need(d, "position", "service"), "service position"),
                          rd.get<std::string>(d, "description", "")});
  }
  for (const auto& p : n["policies"]) {
    rd.keys(p, {"service", "users", "time", "max_distance", "segments"}, "policy");
    Policy pol;
    pol.service_id = rd.as<std::string>(rd.need(p, "service", "policy"), "service");
    if (const auto users = p["users"]) {
      pol.allowed_users.emplace();
      for (const auto& u : users) pol.allowed_users->insert(rd.as<std::string>(u, "users"));
    }
    pol.time_rule = read_time_rule(rd, p["time"]);
    pol.max_distance = rd.opt<double>(p, "max_distance");
    if (p["segments"]) {
      for (const auto& loc : rd.locators(p["segments"], "segments")) pol.segments.insert(loc);
    }
    s.policies.push_back(std::move(pol));
  }
  for (const auto& f : n["facilities"]) {
    rd.keys(f, {"type", "address", "position", "segment", "prices"}, "facility");
    FacilityAdvertisement ad;
    ad.service_type = rd.as<std::string>(rd.need(f, "type", "facility"), "type");
    ad.address = rd.as<std::string>(rd.need(f, "address", "facility"), "address");
    ad.position = rd.point(rd.need(f, "position", "facility"), "facility position");
    ad.segment = rd.locator(rd.need(f, "segment", "facility"), "segment");
    for (const auto& kv : f["prices"]) {
      ad.prices.emplace_back(kv.first.as<std::string>(), rd.as<double>(kv.second, "price"));
    }
    s.facilities.push_back(std::move(ad));
  }
  return s;
}

Injection read_injection(const Reader& rd, const YAML::Node& n) {
  rd.keys(n, {"time", "kind", "vehicle", "target", "expire", "count", "body", "distance", "destination", "interests",
              "service"},
          "injection");
  Injection inj;
  inj.time = rd.as<double>(rd.need(n, "time", "injection"), "time");
  inj.vehicle = rd.as<std::string>(rd.need(n, "vehicle", "injection"), "vehicle");
  const auto kind = rd.as<std::string>(rd.need(n, "kind", "injection"), "kind");
  if (kind == "alert") {
    inj.kind = Injection::Kind::kAlert;
    if (n["target"]) inj.target = rd.locator(n["target"], "target");
    inj.expire = rd.opt<std::uint64_t>(n, "expire");
    inj.count = rd.opt<std::uint64_t>(n, "count");
    inj.body = rd.get<std::string>(n, "body", "");
  } else if (kind == "query_ahead") {
    inj.kind = Injection::Kind::kQueryAhead;
    inj.distance = rd.get<double>(n, "distance", kMileMeters);
  } else if (kind == "user_query") {
    inj.kind = Injection::Kind::kUserQuery;
    inj.request.destination = rd.locator(rd.need(n, "destination", "user_query"), "destination");
    for (const auto& i : n["interests"]) inj.request.interests.push_back(rd.as<std::string>(i, "interests"));
  } else if (kind == "access_request") {
    inj.kind = Injection::Kind::kAccessRequest;
    inj.service = rd.as<std::string>(rd.need(n, "service", "access_request"), "service");
  } else {
    rd.fail(n["kind"], "unknown injection kind '" + kind + "' (alert, query_ahead, user_query, access_request)");
  }
  return inj;
}

void read_radio(const Reader& rd, const YAML::Node& n, RadioProfile& r) {
  if (!n) return;
  rd.keys(n, {"nominal_range", "measured_max_range", "discovery_mean", "discovery_jitter", "setup_time",
              "max_active_slaves"},
          "radio");
  r.nominal_range = rd.get(n, "nominal_range", r.nominal_range);
  r.measured_max_range = rd.get(n, "measured_max_range", r.measured_max_range);
  r.discovery_mean = rd.get(n, "discovery_mean", r.discovery_mean);
  r.discovery_jitter = rd.get(n, "discovery_jitter", r.discovery_jitter);
  r.setup_time = rd.get(n, "setup_time", r.setup_time);
  r.max_active_slaves = rd.get(n, "max_active_slaves", r.max_active_slaves);
}

void read_protocol(const Reader& rd, const YAML::Node& n, ProtocolConfig& p) {
  if (!n) return;
  rd.keys(n, {"retry_interval", "retry_limit", "suppression", "count_mode"}, "protocol");
  p.retry_interval = rd.get(n, "retry_interval", p.retry_interval);
  p.retry_limit = rd.get(n, "retry_limit", p.retry_limit);
  p.suppression = rd.get(n, "suppression", p.suppression);
  if (const auto m = n["count_mode"]) {
    const auto s = rd.as<std::string>(m, "count_mode");
    if (s == "per_recipient") {
      p.count_mode = CountMode::kPerRecipient;
    } else if (s == "per_hop") {
      p.count_mode = CountMode::kPerHop;
    } else {
      rd.fail(m, "count_mode must be per_recipient or per_hop");
    }
  }
}

void read_query(const Reader& rd, const YAML::Node& n, Scenario& sc) {
  if (!n) return;
  rd.keys(n, {"window", "snapshot_interval", "speed_threshold_kmh", "density_threshold", "expire", "count", "routes"},
          "query");
  sc.traffic.window = rd.get(n, "window", sc.traffic.window);
  sc.snapshot_interval = rd.get(n, "snapshot_interval", sc.snapshot_interval);
  if (n["speed_threshold_kmh"]) sc.traffic.speed_threshold = kmh_to_ms(rd.as<double>(n["speed_threshold_kmh"], "speed_threshold_kmh"));
  sc.traffic.density_threshold = rd.get(n, "density_threshold", sc.traffic.density_threshold);
  if (n["expire"]) sc.query.expire = rd.opt<std::uint64_t>(n, "expire");
  sc.query.count = rd.opt<std::uint64_t>(n, "count");
  sc.query.routes = rd.get(n, "routes", sc.query.routes);
}

void read_kernel(const Reader& rd, const YAML::Node& n, Scenario& sc) {
  if (!n) return;
  rd.keys(n, {"link_tick", "station_tick", "processing_delay", "hold_retry"}, "kernel");
  sc.link_tick = rd.get(n, "link_tick", sc.link_tick);
  sc.station_tick = rd.get(n, "station_tick", sc.station_tick);
  sc.processing_delay = rd.get(n, "processing_delay", sc.processing_delay);
  sc.hold_retry = rd.get(n, "hold_retry", sc.hold_retry);
}

}  // namespace

RoadNetwork parse_network_yaml(std::string_view text, const std::string& origin) {
  const Reader rd(origin);
  return read_network(rd, load_yaml(text, origin));
}

RoadNetwork load_network(const fs::path& path) { return parse_network_yaml(read_file(path), path.string()); }

Scenario parse_scenario_yaml(std::string_view text, const fs::path& base_dir, const std::string& origin) {
  const Reader rd(origin);
  const YAML::Node root = load_yaml(text, origin);
  rd.keys(root,
          {"network", "duration", "seed", "start_of_day", "loss_probability", "radio", "protocol", "query", "kernel",
           "vehicles", "convoys", "stations", "injections"},
          "scenario");
  Scenario sc;
  const auto net_node = rd.need(root, "network", "scenario");
  if (net_node.IsScalar()) {
    fs::path p = net_node.as<std::string>();
    if (p.is_relative()) p = base_dir / p;
    try {
      sc.network = std::make_shared<const RoadNetwork>(load_network(p));
    } catch (const LookupError& e) {
      rd.fail(net_node, e.what());
    }
  } else {
    sc.network = std::make_shared<const RoadNetwork>(read_network(rd, net_node));
  }
  const RoadNetwork& net = *sc.network;

  sc.duration = rd.as<double>(rd.need(root, "duration", "scenario"), "duration");
  sc.seed = rd.get<std::uint64_t>(root, "seed", sc.seed);
  if (const auto s = root["start_of_day"]) {
    try {
      sc.start_of_day = WallTime::parse(rd.as<std::string>(s, "start_of_day"));
    } catch (const ParseError& e) {
      rd.fail(s, e.what());
    }
  }
  sc.loss_probability = rd.get(root, "loss_probability", sc.loss_probability);
  read_radio(rd, root["radio"], sc.radio);
  read_protocol(rd, root["protocol"], sc.protocol);
  read_query(rd, root["query"], sc);
  read_kernel(rd, root["kernel"], sc);

  for (const auto& v : root["vehicles"]) sc.vehicles.push_back(read_vehicle(rd, v, net));
  for (const auto& c : root["convoys"]) {
    for (auto& v : read_convoy(rd, c, net)) sc.vehicles.push_back(std::move(v));
  }
  for (const auto& s : root["stations"]) sc.stations.push_back(read_station(rd, s));
  for (const auto& i : root["injections"]) sc.injections.push_back(read_injection(rd, i));
  return sc;
}

Scenario load_scenario(const fs::path& path) {
  Scenario sc = parse_scenario_yaml(read_file(path), path.parent_path(), path.string());
  const auto errors = validate_scenario(sc);
  if (!errors.empty()) {
    std::string text = path.string() + ": scenario is invalid:";
    for (const auto& e : errors) text += "\n  " + e;
    throw ValidationError(text);
  }
  return sc;
}

// -- CSV -------------------------------------------------------------------------------

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

std::string t6(double t) { return fmt::format("{:.6f}", t); }

void counters_row(std::ostream& out, std::string_view scope, std::string_view name, std::string_view type,
                  const Counters& c, const std::optional<double>& latency) {
  out << scope << ',' << csv_field(name) << ',' << type << ',' << c.tx << ',' << c.rx << ',' << c.deliveries << ','
      << c.duplicates << ',' << c.suppressions << ',' << c.expiry_drops << ',' << c.count_drops << ','
      << (latency ? t6(*latency) : std::string()) << '\n';
}

}  // namespace

void write_trace_csv(std::ostream& out, const SimResult& r) {
  out << "time,seq,node,kind,msg_id,detail\n";
  for (const auto& t : r.trace) {
    out << t6(t.time) << ',' << t.seq << ',' << csv_field(t.node) << ',' << t.kind << ',' << csv_field(t.msg_id) << ','
        << csv_field(t.detail) << '\n';
  }
}

void write_metrics_csv(std::ostream& out, const SimResult& r) {
  out << "scope,name,type,tx,rx,deliveries,duplicates,suppressions,expiry_drops,count_drops,first_delivery_latency\n";
  counters_row(out, "total", "all", "", r.metrics.total, std::nullopt);
  for (const auto& [name, c] : r.metrics.per_node) counters_row(out, "node", name, "", c, std::nullopt);
  for (const auto& [id, m] : r.metrics.per_message) {
    counters_row(out, "message", id, m.type, m.counts, m.first_delivery_latency);
  }
}

void write_decisions_csv(std::ostream& out, const SimResult& r) {
  out << "time,station,user,service,verdict,reason\n";
  for (const auto& d : r.decisions) {
    out << t6(d.time) << ',' << csv_field(d.station) << ',' << csv_field(d.user) << ',' << csv_field(d.service) << ','
        << d.verdict << ',' << d.reason << '\n';
  }
}

void write_replies_csv(std::ostream& out, const SimResult& r) {
  out << "resolved_at,resolver,query_id,query_creator,target,delivered_at,body\n";
  for (const auto& q : r.replies) {
    out << t6(q.resolved_at) << ',' << csv_field(q.resolver) << ',' << csv_field(q.query_id) << ','
        << csv_field(q.query_creator) << ',' << format_locator(q.target) << ','
        << (q.delivered_at ? t6(*q.delivered_at) : std::string()) << ',' << csv_field(q.body) << '\n';
  }
}

void write_contacts_csv(std::ostream& out, const SimResult& r) {
  out << "a,b,begin,end,duration\n";
  for (const auto& c : r.contacts) {
    out << csv_field(c.a) << ',' << csv_field(c.b) << ',' << t6(c.begin) << ',' << (c.end ? t6(*c.end) : "") << ','
        << (c.end ? t6(*c.end - c.begin) : "") << '\n';
  }
}

void write_run_outputs(const fs::path& dir, const SimResult& result) {
  fs::create_directories(dir);
  auto emit = [&](const char* name, void (*fn)(std::ostream&, const SimResult&)) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw LookupError("cannot write '" + (dir / name).string() + "'");
    fn(out, result);
  };
  emit("trace.csv", write_trace_csv);
  emit("metrics.csv", write_metrics_csv);
  emit("decisions.csv", write_decisions_csv);
  emit("replies.csv", write_replies_csv);
  emit("contacts.csv", write_contacts_csv);
}

}  // namespace ivc
