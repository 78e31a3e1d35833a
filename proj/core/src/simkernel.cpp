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

#include "ivc/simkernel.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include <fmt/format.h>

#include "ivc/error.hpp"

namespace ivc {

std::string_view to_string(LinkState s) {
  switch (s) {
    case LinkState::kUndiscovered:
      return "undiscovered";
    case LinkState::kDiscovering:
      return "discovering";
    case LinkState::kConnected:
      return "connected";
    case LinkState::kOutOfRange:
      return "out-of-range";
  }
  return "undiscovered";
}

std::vector<std::string> validate_scenario(const Scenario& sc) {
  std::vector<std::string> errors;
  auto check = [&](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      errors.emplace_back(e.what());
    }
  };
  if (!sc.network) {
    errors.emplace_back("scenario has no road network");
    return errors;
  }
  const RoadNetwork& net = *sc.network;
  check([&] { sc.radio.validate(); });
  if (!(sc.duration > 0.0)) errors.emplace_back("duration must be > 0");
  if (!(sc.loss_probability >= 0.0 && sc.loss_probability <= 1.0)) {
    errors.emplace_back("loss_probability must lie in [0, 1]");
  }
  if (!(sc.link_tick > 0.0) || !(sc.station_tick > 0.0) || !(sc.hold_retry > 0.0) || !(sc.snapshot_interval > 0.0)) {
    errors.emplace_back("tick intervals must be > 0");
  }
  if (!(sc.processing_delay >= 0.0)) errors.emplace_back("processing_delay must be >= 0");
  if (!(sc.protocol.retry_interval > 0.0)) errors.emplace_back("protocol retry_interval must be > 0");
  if (!(sc.traffic.window > 0.0)) errors.emplace_back("query window must be > 0");

  std::set<std::string> names;
  for (const auto& v : sc.vehicles) {
    const auto& id = v.trajectory.vehicle_id;
    if (!is_message_token(id)) errors.emplace_back("vehicle id '" + id + "' is not a token");
    if (!names.insert(id).second) errors.emplace_back("duplicate node name '" + id + "'");
    check([&] { validate_trajectory(v.trajectory, net); });
  }
  for (const auto& s : sc.stations) {
    if (!names.insert(s.station_id).second) errors.emplace_back("duplicate node name '" + s.station_id + "'");
    check([&] { validate_station(s, net); });
  }
  for (std::size_t i = 0; i < sc.injections.size(); ++i) {
    const Injection& inj = sc.injections[i];
    const std::string where = "injection " + std::to_string(i);
    const bool known = std::any_of(sc.vehicles.begin(), sc.vehicles.end(),
                                   [&](const VehicleSpec& v) { return v.trajectory.vehicle_id == inj.vehicle; });
    if (!known) errors.emplace_back(where + ": unknown vehicle '" + inj.vehicle + "'");
    if (!(inj.time >= 0.0) || inj.time > sc.duration) errors.emplace_back(where + ": time outside [0, duration]");
    if (inj.target && !net.contains(*inj.target)) {
      errors.emplace_back(where + ": target " + format_locator(*inj.target) + " does not resolve");
    }
    if (inj.kind == Injection::Kind::kUserQuery && !net.contains(inj.request.destination)) {
      errors.emplace_back(where + ": destination " + format_locator(inj.request.destination) + " does not resolve");
    }
    if (inj.kind == Injection::Kind::kAccessRequest && inj.service.empty()) {
      errors.emplace_back(where + ": access request names no service");
    }
    if (inj.kind == Injection::Kind::kQueryAhead && !(inj.distance > 0.0)) {
      errors.emplace_back(where + ": query distance must be > 0");
    }
  }
  return errors;
}

// ---------------------------------------------------------------------------

namespace {

enum class EventKind { kLinkTick, kStationTick, kInject, kRx, kTimer, kAlertTimer, kDiscoveryDone, kHoldRetry };

struct Event {
  double time = 0.0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::kLinkTick;
  NodeId node = 0;
  NodeId other = 0;
  std::uint64_t tag = 0;  // link epoch, hold generation or injection index
  std::string msg_id;
  std::shared_ptr<const Message> msg;
  Point sender_position;

  static Event at(double t, EventKind k, NodeId node = 0, NodeId other = 0) {
    Event e;
    e.time = t;
    e.kind = k;
    e.node = node;
    e.other = other;
    return e;
  }
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

struct Held {
  Message msg;
  std::uint64_t generation = 0;
};

struct NodeRt {
  std::string name;
  const VehicleSpec* vehicle = nullptr;
  std::unique_ptr<BaseStation> station;
  ForwardingState fwd;
  std::set<std::string> station_seen;
  std::map<std::string, Held> held;
  std::uint64_t hold_generation = 0;
  IdSequence ids{""};
  TimeInterval active{0.0, kUnbounded};
  std::optional<double> alert_timer;
  std::map<std::string, std::set<std::string>> offered;  // vehicle -> services, per visit

  bool is_station() const { return station != nullptr; }
};

struct Link {
  LinkState state = LinkState::kUndiscovered;
  std::uint64_t epoch = 0;
  bool in_range = false;
  std::optional<double> contact_begin;
  double last_tick = 0.0;
  bool seen_tick = false;
};

}  // namespace

struct Simulation::Impl {
  Scenario sc;
  const RoadNetwork& net;
  Rng rng;
  double now = 0.0;
  std::uint64_t next_seq = 0;
  std::uint64_t trace_seq = 0;
  std::priority_queue<Event, std::vector<Event>, EventAfter> queue;
  std::vector<NodeRt> nodes;
  std::map<std::string, NodeId> by_name;
  std::vector<NodeId> vehicle_ids;
  std::vector<NodeId> station_ids;
  std::map<std::pair<NodeId, NodeId>, Link> links;
  std::map<std::string, std::size_t> reply_index;  // reply msg id -> replies[]
  SimResult result;
  bool finished = false;

  Impl(const Scenario& scenario, std::uint64_t seed)
      : sc(scenario), net(*scenario.network), rng(seed) {
    for (const auto& v : sc.vehicles) {
      NodeRt n;
      n.name = v.trajectory.vehicle_id;
      n.vehicle = &v;
      n.ids = IdSequence(n.name);
      n.active = active_interval(v.trajectory, net);
      add_node(std::move(n));
    }
    for (const auto& s : sc.stations) {
      NodeRt n;
      n.name = s.station_id;
      n.station = std::make_unique<BaseStation>(s, net);
      n.ids = IdSequence(n.name + "-r");
      add_node(std::move(n));
    }
    for (NodeId i = 0; i < nodes.size(); ++i) {
      (nodes[i].is_station() ? station_ids : vehicle_ids).push_back(i);
      result.metrics.per_node[nodes[i].name];
    }
    // Ticks go in first so they run before anything else stamped with the
    // same time.
    const auto link_ticks = static_cast<std::uint64_t>(std::floor(sc.duration / sc.link_tick + 1e-9));
    for (std::uint64_t k = 0; k <= link_ticks; ++k) {
      push(Event::at(static_cast<double>(k) * sc.link_tick, EventKind::kLinkTick));
    }
    if (!station_ids.empty()) {
      const auto station_ticks = static_cast<std::uint64_t>(std::floor(sc.duration / sc.station_tick + 1e-9));
      for (std::uint64_t k = 0; k <= station_ticks; ++k) {
        push(Event::at(static_cast<double>(k) * sc.station_tick, EventKind::kStationTick));
      }
    }
    std::vector<std::size_t> order(sc.injections.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sc.injections[a].time < sc.injections[b].time; });
    for (std::size_t i : order) {
      Event e = Event::at(sc.injections[i].time, EventKind::kInject);
      e.tag = i;
      push(std::move(e));
    }
  }

  void add_node(NodeRt n) {
    by_name[n.name] = static_cast<NodeId>(nodes.size());
    nodes.push_back(std::move(n));
  }

  void push(Event e) {
    e.seq = next_seq++;
    queue.push(std::move(e));
  }

  double wall(double t) const { return static_cast<double>(sc.start_of_day.seconds_of_day()) + t; }
  WallTime wall_time(double t) const {
    return WallTime::from_seconds(static_cast<std::int64_t>(std::floor(wall(t))));
  }

  void trace(const NodeRt& n, std::string kind, const std::string& msg_id, std::string detail = {}) {
    result.trace.push_back({now, trace_seq++, n.name, std::move(kind), msg_id, std::move(detail)});
  }

  // -- geometry ---------------------------------------------------------------

  std::optional<Pose> pose(NodeId id, double t) const {
    const NodeRt& n = nodes[id];
    if (n.is_station()) {
      Pose p;
      p.position = n.station->position();
      p.segment = n.station->home_segment();
      p.time = t;
      return p;
    }
    if (t < n.active.begin - 1e-9 || t > n.active.end + 1e-9) return std::nullopt;
    return pose_at(n.vehicle->trajectory, net, t);
  }

  bool vehicles_in_range(NodeId a, NodeId b, double t) const {
    const auto pa = pose(a, t);
    const auto pb = pose(b, t);
    return pa && pb && distance(pa->position, pb->position) <= sc.radio.nominal_range;
  }

  bool station_sees(NodeId station, NodeId vehicle, double t) const {
    const auto pv = pose(vehicle, t);
    return pv && nodes[station].station->covers(pv->position);
  }

  static std::pair<NodeId, NodeId> key(NodeId a, NodeId b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

  LinkState link_state(NodeId a, NodeId b) const {
    if (a == b) return LinkState::kConnected;
    const bool sa = nodes[a].is_station();
    const bool sb = nodes[b].is_station();
    if (sa && sb) return LinkState::kOutOfRange;
    if (sa || sb) {
      return station_sees(sa ? a : b, sa ? b : a, now) ? LinkState::kConnected : LinkState::kOutOfRange;
    }
    const auto it = links.find(key(a, b));
    return it == links.end() ? LinkState::kUndiscovered : it->second.state;
  }

  bool can_reach(NodeId from, NodeId to) const {
    if (from == to) return false;
    if (nodes[from].is_station() || nodes[to].is_station()) return link_state(from, to) == LinkState::kConnected;
    return link_state(from, to) == LinkState::kConnected && vehicles_in_range(from, to, now);
  }

  std::vector<NodeId> connected_vehicles(NodeId n) const {
    std::vector<NodeId> out;
    for (NodeId v : vehicle_ids) {
      if (can_reach(n, v)) out.push_back(v);
    }
    return out;
  }

  // -- metrics ----------------------------------------------------------------

  Counters& node_counters(NodeId n) { return result.metrics.per_node[nodes[n].name]; }

  MessageMetrics& message_metrics(const Message& m) {
    auto [it, inserted] = result.metrics.per_message.try_emplace(m.id);
    if (inserted) {
      it->second.type = std::string(to_string(m.type));
      it->second.creator = m.creator;
      it->second.created_at = now;
    }
    return it->second;
  }

  template <typename Field>
  void bump(NodeId n, const Message& m, Field field) {
    ++(message_metrics(m).counts.*field);
    ++(node_counters(n).*field);
    ++(result.metrics.total.*field);
  }

  void note_created(NodeId n, const Message& m, std::string_view how) {
    message_metrics(m);
    trace(nodes[n], "originate", m.id, std::string(how));
  }

  // -- radio ----------------------------------------------------------------

  void transmit(NodeId from, const Message& msg, std::optional<NodeId> to) {
    const auto sender = pose(from, now);
    bump(from, msg, &Counters::tx);
    trace(nodes[from], "tx", msg.id, to ? "unicast:" + nodes[*to].name : std::string("broadcast"));
    if (!sender) return;
    auto shared = std::make_shared<const Message>(msg);
    std::vector<NodeId> targets;
    if (to) {
      targets.push_back(*to);
    } else {
      for (NodeId r = 0; r < nodes.size(); ++r) targets.push_back(r);
    }
    for (NodeId r : targets) {
      if (!can_reach(from, r)) continue;
      if (sc.loss_probability > 0.0 && rng.bernoulli(sc.loss_probability)) {
        trace(nodes[from], "lost", msg.id, "to=" + nodes[r].name);
        continue;
      }
      Event e = Event::at(now + sc.processing_delay, EventKind::kRx, r, from);
      e.msg = shared;
      e.sender_position = sender->position;
      push(std::move(e));
    }
  }

  void on_link_tick() {
    for (std::size_t i = 0; i < vehicle_ids.size(); ++i) {
      for (std::size_t j = i + 1; j < vehicle_ids.size(); ++j) {
        const NodeId a = vehicle_ids[i];
        const NodeId b = vehicle_ids[j];
        const bool in = vehicles_in_range(a, b, now);
        Link& link = links[{a, b}];
        if (in != link.in_range) record_contact(a, b, link, in);
        link.in_range = in;
        link.last_tick = now;
        link.seen_tick = true;

        if (in && link.state == LinkState::kUndiscovered) {
          link.state = LinkState::kDiscovering;
          ++link.epoch;
          const double wait = sample_discovery(sc.radio, rng) + sc.radio.setup_time;
          trace(nodes[a], "link", "", nodes[b].name + ":discovering");
          Event e = Event::at(now + wait, EventKind::kDiscoveryDone, a, b);
          e.tag = link.epoch;
          push(std::move(e));
        } else if (!in && link.state != LinkState::kUndiscovered) {
          link.state = LinkState::kUndiscovered;
          ++link.epoch;
          trace(nodes[a], "link", "", nodes[b].name + ":undiscovered");
        }
      }
    }
  }

  void record_contact(NodeId a, NodeId b, Link& link, bool entering) {
    // Refine the boundary between the previous tick and now.
    double lo = link.seen_tick ? link.last_tick : now;
    double hi = now;
    while (hi - lo > 1e-3) {
      const double mid = 0.5 * (lo + hi);
      (vehicles_in_range(a, b, mid) == entering ? hi : lo) = mid;
    }
    const double boundary = 0.5 * (lo + hi);
    if (entering) {
      link.contact_begin = link.seen_tick ? boundary : now;
    } else if (link.contact_begin) {
      result.contacts.push_back({nodes[a].name, nodes[b].name, *link.contact_begin, boundary});
      link.contact_begin.reset();
    }
  }

  void on_discovery_done(const Event& e) {
    Link& link = links[key(e.node, e.other)];
    if (link.epoch != e.tag || link.state != LinkState::kDiscovering) return;
    const auto [a, b] = key(e.node, e.other);
    if (!vehicles_in_range(a, b, now)) {
      link.state = LinkState::kUndiscovered;
      ++link.epoch;
      trace(nodes[a], "link", "", nodes[b].name + ":undiscovered");
      return;
    }
    link.state = LinkState::kConnected;
    trace(nodes[a], "link", "", nodes[b].name + ":connected");
    retry_held(a);
    retry_held(b);
  }

  // -- message handling -------------------------------------------------------

  void on_rx(const Event& e) {
    const NodeId r = e.node;
    const Message& msg = *e.msg;
    NodeRt& n = nodes[r];
    const auto here = pose(r, now);
    if (!here) {
      trace(n, "missed", msg.id, "inactive");
      return;
    }
    bump(r, msg, &Counters::rx);
    trace(n, "rx", msg.id, "from=" + nodes[e.other].name);
    if (n.is_station()) {
      station_receive(r, msg, e.other);
      return;
    }

    RxContext ctx{e.sender_position, here->position, here->heading, now, wall(now)};
    const RxOutcome out = on_receive(n.fwd, msg, ctx, sc.protocol);
    if (out.drop) {
      if (*out.drop == DropReason::kExpired) {
        bump(r, msg, &Counters::expiry_drops);
        trace(n, "expire-drop", msg.id);
      } else {
        bump(r, msg, &Counters::count_drops);
        trace(n, "count-drop", msg.id);
      }
      return;
    }
    if (out.duplicate) {
      bump(r, msg, &Counters::duplicates);
      trace(n, "duplicate", msg.id, out.implicit_ack ? "from-behind" : "");
      if (std::find(out.actions.begin(), out.actions.end(), Action::kCancelRebroadcast) != out.actions.end()) {
        bump(r, msg, &Counters::suppressions);
        trace(n, "suppress", msg.id, "implicit-ack");
      }
      return;
    }
    deliver(r, msg);
    for (Action a : out.actions) {
      switch (a) {
        case Action::kScheduleRebroadcast:
          if (const auto* p = n.fwd.pending(msg.id)) schedule_timer(r, msg.id, p->next_tx);
          break;
        case Action::kForwardGeographic:
          handle_query(r, sc.protocol.count_mode == CountMode::kPerHop ? decrement_count(out.accepted)
                                                                        : out.accepted);
          break;
        case Action::kCancelRebroadcast:
          break;
        case Action::kNone:
          if (msg.type == MsgType::kService) vehicle_service(r, msg, e.other);
          break;
      }
    }
  }

  void deliver(NodeId r, const Message& msg) {
    bump(r, msg, &Counters::deliveries);
    auto& mm = message_metrics(msg);
    if (!mm.first_delivery_latency) mm.first_delivery_latency = now - mm.created_at;
    trace(nodes[r], "deliver", msg.id);
  }

  void schedule_timer(NodeId n, const std::string& id, double at) {
    Event e = Event::at(std::max(at, now), EventKind::kTimer, n);
    e.msg_id = id;
    push(std::move(e));
  }

  void on_timer(const Event& e) {
    NodeRt& n = nodes[e.node];
    if (!pose(e.node, now)) return;  // vehicle left the simulation
    const TxDecision d = rebroadcast_policy(n.fwd, e.msg_id, now, wall(now), sc.protocol);
    if (d.transmit) transmit(e.node, *d.transmit, std::nullopt);
    if (d.stopped && !d.transmit && *d.stopped == StopReason::kExpired) {
      trace(n, "expire-drop", e.msg_id, "schedule");
    } else if (d.stopped && !d.transmit) {
      trace(n, "stop", e.msg_id, std::string(to_string(*d.stopped)));
    }
    if (d.next_tx && !d.transmit) return;  // not due yet; its own event is queued
    if (d.next_tx) schedule_timer(e.node, e.msg_id, *d.next_tx);
  }

  // Queries and replies: resolve, hand to the addressee, or move greedily.
  void handle_query(NodeId r, const Message& msg) {
    NodeRt& n = nodes[r];
    const std::string body = msg.body.value_or("");
    const std::string kind = body_kind(body);
    if (kind == "reply") {
      if (body_field(body, "to") == n.name) {
        reply_delivered(r, msg);
        return;
      }
    } else if (kind == "traffic" && !n.is_station()) {
      const auto here = pose(r, now);
      if (here && here->segment == msg.target) {
        resolve_traffic(r, msg);
        return;
      }
    }
    route(r, msg);
  }

  void route(NodeId r, const Message& msg) {
    NodeRt& n = nodes[r];
    const auto here = pose(r, now);
    if (!here) return;
    const std::string body = msg.body.value_or("");
    const std::string kind = body_kind(body);

    if (kind == "reply") {
      if (auto to = body_field(body, "to")) {
        if (auto it = by_name.find(*to); it != by_name.end() && can_reach(r, it->second)) {
          transmit(r, msg, it->second);
          return;
        }
      }
    }
    if (kind == "facility" && !n.is_station()) {
      for (NodeId s : station_ids) {
        if (nodes[s].station->covers_segment(msg.target) && can_reach(r, s)) {
          transmit(r, msg, s);
          return;
        }
      }
    }
    std::vector<Neighbor> neighbors;
    for (NodeId v : connected_vehicles(r)) neighbors.push_back({v, pose(v, now)->position});
    const Point target = net.resolve(msg.target).centroid();
    if (auto hop = next_hop_geographic(here->position, neighbors, target)) {
      transmit(r, msg, *hop);
      return;
    }
    const std::uint64_t gen = ++n.hold_generation;
    n.held[msg.id] = Held{msg, gen};
    trace(n, "hold", msg.id);
    Event e = Event::at(now + sc.hold_retry, EventKind::kHoldRetry, r);
    e.msg_id = msg.id;
    e.tag = gen;
    push(std::move(e));
  }

  void on_hold_retry(const Event& e) {
    NodeRt& n = nodes[e.node];
    auto it = n.held.find(e.msg_id);
    if (it == n.held.end() || it->second.generation != e.tag) return;
    release_held(e.node, it);
  }

  void retry_held(NodeId r) {
    NodeRt& n = nodes[r];
    std::vector<std::string> ids;
    for (const auto& [id, h] : n.held) ids.push_back(id);
    for (const auto& id : ids) {
      auto it = n.held.find(id);
      if (it != n.held.end()) release_held(r, it);
    }
  }

  void release_held(NodeId r, std::map<std::string, Held>::iterator it) {
    NodeRt& n = nodes[r];
    Message msg = std::move(it->second.msg);
    n.held.erase(it);
    if (is_expired(msg, wall(now))) {
      trace(n, "expire-drop", msg.id, "held");
      return;
    }
    if (!pose(r, now)) return;
    route(r, msg);
  }

  void resolve_traffic(NodeId r, const Message& query) {
    NodeRt& n = nodes[r];
    // The resolver pulls ODI history from every vehicle reachable over
    // connected links.
    std::set<NodeId> seen{r};
    std::vector<NodeId> frontier{r};
    while (!frontier.empty()) {
      const NodeId cur = frontier.back();
      frontier.pop_back();
      for (NodeId v : connected_vehicles(cur)) {
        if (seen.insert(v).second) frontier.push_back(v);
      }
    }
    std::vector<SensorSnapshot> snapshots;
    for (NodeId v : seen) {
      auto s = sample_snapshots(nodes[v].vehicle->trajectory, net, now - sc.traffic.window, now, sc.snapshot_interval);
      snapshots.insert(snapshots.end(), s.begin(), s.end());
    }
    const TrafficReply reply = resolve_traffic_query(snapshots, query.target, net.resolve(query.target).length(), now,
                                                     sc.traffic);
    send_reply(r, query, format_traffic_reply(reply));
    trace(n, "resolve", query.id, fmt::format("collaborators={}", seen.size()));
  }

  void send_reply(NodeId r, const Message& query, const std::string& payload) {
    NodeRt& n = nodes[r];
    const auto here = pose(r, now);
    Message reply;
    reply.type = MsgType::kQuery;
    reply.target = query.source;
    reply.id = n.ids.next();
    reply.source = here ? here->segment : query.target;
    reply.creator = n.name;
    reply.time = wall_time(now);
    reply.expire = sc.query.expire;
    reply.body = "reply;to=" + query.creator + ";of=" + query.id + ";" + payload;
    n.fwd.remember(reply.id, now);
    if (n.is_station()) n.station_seen.insert(reply.id);
    note_created(r, reply, "reply");
    reply_index[reply.id] = result.replies.size();
    result.replies.push_back({now, n.name, query.id, query.creator, query.target, *reply.body, std::nullopt});
    handle_query(r, reply);
  }

  void reply_delivered(NodeId r, const Message& reply) {
    if (auto it = reply_index.find(reply.id); it != reply_index.end()) {
      auto& rec = result.replies[it->second];
      if (!rec.delivered_at) rec.delivered_at = now;
    }
    trace(nodes[r], "reply", reply.id, "of=" + body_field(reply.body.value_or(""), "of").value_or(""));
  }

  // -- vehicles <-> stations --------------------------------------------------

  Message vehicle_service_message(NodeId r, const SegmentLocator& target, std::string body) {
    NodeRt& n = nodes[r];
    const auto here = pose(r, now);
    Message m;
    m.type = MsgType::kService;
    m.target = target;
    m.id = n.ids.next();
    m.source = here ? here->segment : target;
    m.creator = n.name;
    m.time = wall_time(now);
    m.body = std::move(body);
    n.fwd.remember(m.id, now);
    note_created(r, m, "service");
    return m;
  }

  void vehicle_service(NodeId r, const Message& msg, NodeId sender) {
    NodeRt& n = nodes[r];
    const std::string body = msg.body.value_or("");
    const std::string kind = body_kind(body);
    if (kind == "id-request") {
      if (!n.vehicle->user) return;
      const auto& u = *n.vehicle->user;
      transmit(r, vehicle_service_message(r, msg.source, "id-response;username=" + u.username + ";code=" + u.code),
               sender);
    } else if (kind == "offer") {
      const auto service = body_field(body, "service").value_or("");
      trace(n, "offer-received", msg.id, "service=" + service);
      if (n.vehicle->auto_accept_offers) {
        transmit(r, vehicle_service_message(r, msg.source, "access-request;service=" + service), sender);
      }
    } else if (kind == "access") {
      trace(n, "access", msg.id,
            "service=" + body_field(body, "service").value_or("") + ";verdict=" + body_field(body, "verdict").value_or(""));
    }
  }

  void station_receive(NodeId s, const Message& msg, NodeId sender) {
    NodeRt& n = nodes[s];
    if (is_expired(msg, wall(now))) {
      bump(s, msg, &Counters::expiry_drops);
      trace(n, "expire-drop", msg.id);
      return;
    }
    if (!n.station_seen.insert(msg.id).second) {
      bump(s, msg, &Counters::duplicates);
      trace(n, "duplicate", msg.id);
      return;
    }
    deliver(s, msg);
    BaseStation& st = *n.station;
    const std::string body = msg.body.value_or("");
    const std::string kind = body_kind(body);
    switch (msg.type) {
      case MsgType::kAlert: {
        const IngestResult res = st.alert_ingest(msg, now, wall(now));
        if (res == IngestResult::kStored || res == IngestResult::kBroadcastOnly) {
          trace(n, res == IngestResult::kStored ? "store" : "relay", msg.id);
          transmit(s, msg, std::nullopt);
          arm_alert_timer(s);
        } else if (res == IngestResult::kDroppedExpired) {
          trace(n, "expire-drop", msg.id, "ingest");
        }
        break;
      }
      case MsgType::kService:
        if (kind == "id-response") {
          const bool ok = st.open_session(nodes[sender].name, body_field(body, "username").value_or(""),
                                          body_field(body, "code").value_or(""));
          trace(n, "session", msg.id, nodes[sender].name + (ok ? ":open" : ":rejected"));
        } else if (kind == "access-request") {
          access_request(s, sender, body_field(body, "service").value_or(""), msg.source);
        }
        break;
      case MsgType::kQuery:
        if (kind == "facility") {
          resolve_facility(s, msg);
        } else if (kind == "reply") {
          handle_query(s, msg);
        }
        break;
    }
  }

  void access_request(NodeId s, NodeId vehicle, const std::string& service, const SegmentLocator& reply_to) {
    NodeRt& n = nodes[s];
    BaseStation& st = *n.station;
    const auto where = pose(vehicle, now);
    const std::string user = st.session_user(nodes[vehicle].name).value_or("");
    DecisionRecord rec{now, n.name, user, service, "deny", ""};
    try {
      const AccessVerdict v = st.access_decision(user, service, where ? where->position : Point{},
                                                 where ? std::optional(where->segment) : std::nullopt, wall(now));
      rec.verdict = v.granted ? "grant" : "deny";
      rec.reason = v.reason ? std::string(to_string(*v.reason)) : "";
    } catch (const LookupError&) {
      rec.verdict = "error";
      rec.reason = "unknown-service";
    }
    result.decisions.push_back(rec);
    trace(n, "decision", "", user + ":" + service + ":" + rec.verdict + (rec.reason.empty() ? "" : ":" + rec.reason));
    Message reply = station_message(s, reply_to, "access;service=" + service + ";verdict=" + rec.verdict +
                                                     (rec.reason.empty() ? "" : ";reason=" + rec.reason));
    transmit(s, reply, vehicle);
  }

  Message station_message(NodeId s, const SegmentLocator& target, std::string body) {
    NodeRt& n = nodes[s];
    Message m;
    m.type = MsgType::kService;
    m.target = target;
    m.id = n.station->ids().next();
    m.source = n.station->home_segment();
    m.creator = n.name;
    m.time = wall_time(now);
    m.body = std::move(body);
    n.station_seen.insert(m.id);
    note_created(s, m, "service");
    return m;
  }

  void resolve_facility(NodeId s, const Message& query) {
    NodeRt& n = nodes[s];
    const auto type = body_field(query.body.value_or(""), "type").value_or("");
    const auto& ads = n.station->config().facilities;
    const auto hits = resolve_facility_query(ads, {query.target}, type, net);
    std::string payload = fmt::format("facility;type={};found={}", type, hits.size());
    std::string list;
    for (const auto& h : hits) {
      std::string addr = h.address;
      std::replace_if(addr.begin(), addr.end(), [](char c) { return c == ';' || c == '=' || c == '|'; }, '_');
      if (!list.empty()) list += '|';
      list += addr;
    }
    if (!list.empty()) payload += ";results=" + list;
    trace(n, "resolve", query.id, fmt::format("facilities={}", hits.size()));
    send_reply(s, query, payload);
  }

  void arm_alert_timer(NodeId s) {
    NodeRt& n = nodes[s];
    const auto next = n.station->next_alert_time();
    if (!next) return;
    if (n.alert_timer && *n.alert_timer <= *next) return;
    n.alert_timer = *next;
    push(Event::at(*next, EventKind::kAlertTimer, s));
  }

  void on_alert_timer(const Event& e) {
    NodeRt& n = nodes[e.node];
    if (!n.alert_timer || *n.alert_timer != e.time) return;
    n.alert_timer.reset();
    for (const Message& m : n.station->due_alert_broadcasts(now, wall(now))) {
      trace(n, "rebroadcast", m.id, "temporal");
      transmit(e.node, m, std::nullopt);
    }
    arm_alert_timer(e.node);
  }

  void on_station_tick() {
    for (NodeId s : station_ids) {
      NodeRt& n = nodes[s];
      BaseStation& st = *n.station;
      if (const auto purged = st.purge_expired_alerts(wall(now)); purged > 0) {
        trace(n, "purge", "", fmt::format("expired={}", purged));
      }
      std::vector<VisibleVehicle> visible;
      std::map<std::string, NodeId> ids;
      for (NodeId v : vehicle_ids) {
        if (!station_sees(s, v, now)) continue;
        visible.push_back({nodes[v].name, *pose(v, now)});
        ids[nodes[v].name] = v;
      }
      for (const Message& m : st.location_updater_tick(visible, wall(now))) {
        note_created(s, m, "location-update");
        n.station_seen.insert(m.id);
        transmit(s, m, ids.at(*body_field(*m.body, "vehicle")));
      }
      for (const Message& m : st.service_provider_tick(visible, wall(now))) {
        note_created(s, m, "id-request");
        n.station_seen.insert(m.id);
        transmit(s, m, ids.at(*body_field(*m.body, "vehicle")));
      }
      std::erase_if(n.offered, [&](const auto& kv) { return !ids.count(kv.first); });
      for (const auto& vv : visible) {
        const auto user = st.session_user(vv.vehicle_id);
        if (!user) continue;
        for (const auto& service : st.context_services(*user, vv.pose.position, vv.pose.segment, wall(now))) {
          if (!n.offered[vv.vehicle_id].insert(service).second) continue;
          Message offer = station_message(s, vv.pose.segment, "offer;service=" + service + ";vehicle=" + vv.vehicle_id);
          trace(n, "offer", offer.id, vv.vehicle_id + ":" + service);
          transmit(s, offer, ids.at(vv.vehicle_id));
        }
      }
    }
  }

  void on_inject(const Event& e) {
    const Injection& inj = sc.injections[e.tag];
    const NodeId r = by_name.at(inj.vehicle);
    NodeRt& n = nodes[r];
    const auto here = pose(r, now);
    if (!here) {
      trace(n, "inject-error", "", "vehicle not on the road");
      return;
    }
    switch (inj.kind) {
      case Injection::Kind::kAlert: {
        Message m;
        m.type = MsgType::kAlert;
        m.target = inj.target.value_or(here->segment);
        m.id = n.ids.next();
        m.source = here->segment;
        m.creator = n.name;
        m.time = wall_time(now);
        m.expire = inj.expire;
        m.count = inj.count;
        if (!inj.body.empty()) m.body = inj.body;
        n.fwd.originate(m, now, sc.protocol);
        note_created(r, m, "alert");
        schedule_timer(r, m.id, now);
        break;
      }
      case Injection::Kind::kQueryAhead: {
        SegmentLocator target;
        try {
          target = segment_ahead(n.vehicle->trajectory, net, now, inj.distance);
        } catch (const LookupError& err) {
          trace(n, "inject-error", "", err.what());
          return;
        }
        Message m;
        m.type = MsgType::kQuery;
        m.target = target;
        m.id = n.ids.next();
        m.source = here->segment;
        m.creator = n.name;
        m.time = wall_time(now);
        m.expire = sc.query.expire;
        m.count = sc.query.count;
        m.body = "traffic";
        n.fwd.remember(m.id, now);
        note_created(r, m, "query-ahead");
        handle_query(r, m);
        break;
      }
      case Injection::Kind::kUserQuery: {
        std::vector<Message> queries;
        try {
          queries = originate_user_query(n.name, *here, inj.request, net, wall(now), sc.query, n.ids);
        } catch (const LookupError& err) {
          trace(n, "inject-error", "", err.what());
          return;
        }
        for (const auto& m : queries) {
          n.fwd.remember(m.id, now);
          note_created(r, m, "user-query");
        }
        for (const auto& m : queries) handle_query(r, m);
        break;
      }
      case Injection::Kind::kAccessRequest: {
        for (NodeId s : station_ids) {
          const auto& services = nodes[s].station->config().services;
          const bool offers = std::any_of(services.begin(), services.end(),
                                          [&](const ServiceDef& d) { return d.id == inj.service; });
          if (!offers || !can_reach(r, s)) continue;
          transmit(r, vehicle_service_message(r, nodes[s].station->home_segment(), "access-request;service=" + inj.service),
                   s);
          return;
        }
        trace(n, "inject-error", "", "no station offering '" + inj.service + "' in range");
        break;
      }
    }
  }

  void dispatch(const Event& e) {
    switch (e.kind) {
      case EventKind::kLinkTick:
        on_link_tick();
        break;
      case EventKind::kStationTick:
        on_station_tick();
        break;
      case EventKind::kInject:
        on_inject(e);
        break;
      case EventKind::kRx:
        on_rx(e);
        break;
      case EventKind::kTimer:
        on_timer(e);
        break;
      case EventKind::kAlertTimer:
        on_alert_timer(e);
        break;
      case EventKind::kDiscoveryDone:
        on_discovery_done(e);
        break;
      case EventKind::kHoldRetry:
        on_hold_retry(e);
        break;
    }
  }

  void run_until(double t) {
    const double limit = std::min(t, sc.duration);
    while (!queue.empty() && queue.top().time <= limit + 1e-12) {
      Event e = queue.top();
      queue.pop();
      now = e.time;
      dispatch(e);
    }
    now = std::max(now, limit);
  }

  void close() {
    if (finished) return;
    finished = true;
    for (auto& [k, link] : links) {
      if (link.contact_begin) result.contacts.push_back({nodes[k.first].name, nodes[k.second].name, *link.contact_begin, std::nullopt});
    }
    for (NodeId st : station_ids) result.stored_alerts[nodes[st].name] = nodes[st].station->temporal_alerts().size();
    std::stable_sort(result.contacts.begin(), result.contacts.end(),
                     [](const ContactRecord& a, const ContactRecord& b) { return a.begin < b.begin; });
  }
};

Simulation::Simulation(const Scenario& scenario) {
  auto errors = validate_scenario(scenario);
  if (!errors.empty()) {
    std::string text = "scenario is invalid:";
    for (const auto& e : errors) text += "\n  " + e;
    throw ValidationError(text);
  }
  impl_ = std::make_unique<Impl>(scenario, scenario.seed);
}

Simulation::~Simulation() = default;

void Simulation::run_until(double t) { impl_->run_until(t); }
double Simulation::now() const { return impl_->now; }

std::optional<NodeId> Simulation::node_id(const std::string& name) const {
  const auto it = impl_->by_name.find(name);
  if (it == impl_->by_name.end()) return std::nullopt;
  return it->second;
}

LinkState Simulation::link_state(NodeId a, NodeId b) const { return impl_->link_state(a, b); }

void Simulation::transmit(NodeId from, const Message& msg, std::optional<NodeId> to) {
  impl_->message_metrics(msg);
  impl_->transmit(from, msg, to);
}

const SimResult& Simulation::result() const { return impl_->result; }

SimResult Simulation::finish() {
  impl_->run_until(impl_->sc.duration);
  impl_->close();
  return std::move(impl_->result);
}

SimResult run(const Scenario& scenario) {
  Simulation sim(scenario);
  return sim.finish();
}

SimResult run(const Scenario& scenario, std::uint64_t seed) {
  Scenario copy = scenario;
  copy.seed = seed;
  Simulation sim(copy);
  return sim.finish();
}

}  // namespace ivc
