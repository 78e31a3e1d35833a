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

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ivc/mfs.hpp"
#include "ivc/mobility.hpp"
#include "ivc/nodes.hpp"
#include "ivc/protocol.hpp"
#include "ivc/radio.hpp"
#include "ivc/roadnet.hpp"

namespace ivc {

struct Credentials {
  std::string username;
  std::string code;
};

struct VehicleSpec {
  VehicleTrajectory trajectory;
  std::optional<Credentials> user;
  bool auto_accept_offers = true;
};

struct Injection {
  enum class Kind { kAlert, kQueryAhead, kUserQuery, kAccessRequest };
  Kind kind = Kind::kAlert;
  double time = 0.0;
  std::string vehicle;
  // alert
  std::optional<SegmentLocator> target;  // default: the vehicle's segment
  std::optional<std::uint64_t> expire;
  std::optional<std::uint64_t> count;
  std::string body;
  // query_ahead
  double distance = kMileMeters;
  // user_query
  UserRequest request;
  // access_request
  std::string service;
};

struct Scenario {
  std::shared_ptr<const RoadNetwork> network;
  RadioProfile radio;
  ProtocolConfig protocol;
  TrafficParams traffic;
  QueryOptions query;
  double snapshot_interval = 1.0;
  std::vector<VehicleSpec> vehicles;
  std::vector<StationConfig> stations;
  std::vector<Injection> injections;
  double loss_probability = 0.0;
  double duration = 0.0;
  std::uint64_t seed = 1;
  WallTime start_of_day;
  double link_tick = 0.1;          // range / discovery bookkeeping cadence
  double station_tick = 1.0;
  double processing_delay = 0.005;  // per hop
  double hold_retry = 1.0;
};

/// Every problem found, in a stable order. Empty means runnable.
std::vector<std::string> validate_scenario(const Scenario& scenario);

struct TraceRecord {
  double time = 0.0;
  std::uint64_t seq = 0;
  std::string node;
  std::string kind;
  std::string msg_id;
  std::string detail;
};

struct DecisionRecord {
  double time = 0.0;
  std::string station;
  std::string user;
  std::string service;
  std::string verdict;  // grant | deny
  std::string reason;
};

struct QueryReplyRecord {
  double resolved_at = 0.0;
  std::string resolver;
  std::string query_id;
  std::string query_creator;
  SegmentLocator target;
  std::string body;  // reply payload as sent
  std::optional<double> delivered_at;
};

struct ContactRecord {
  std::string a;
  std::string b;
  double begin = 0.0;
  std::optional<double> end;  // open when still in range at the end
};

struct Counters {
  std::uint64_t tx = 0;
  std::uint64_t rx = 0;
  std::uint64_t deliveries = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t suppressions = 0;
  std::uint64_t expiry_drops = 0;
  std::uint64_t count_drops = 0;
};

struct MessageMetrics {
  Counters counts;
  std::string type;
  std::string creator;
  double created_at = 0.0;
  std::optional<double> first_delivery_latency;
};

struct Metrics {
  std::map<std::string, MessageMetrics> per_message;
  std::map<std::string, Counters> per_node;
  Counters total;
};

struct SimResult {
  Metrics metrics;
  std::vector<TraceRecord> trace;
  std::vector<DecisionRecord> decisions;
  std::vector<QueryReplyRecord> replies;
  std::vector<ContactRecord> contacts;
  std::map<std::string, std::size_t> stored_alerts;  // per station, at the end of the run
};

enum class LinkState { kUndiscovered, kDiscovering, kConnected, kOutOfRange };
std::string_view to_string(LinkState s);

/// Throws ValidationError carrying every problem when the scenario is invalid.
/// Identical (scenario, seed) pairs give identical results.
SimResult run(const Scenario& scenario);
SimResult run(const Scenario& scenario, std::uint64_t seed);

// Step-wise access for tests and tools; `run` drives one of these to the end.
class Simulation {
 public:
  explicit Simulation(const Scenario& scenario);
  ~Simulation();
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  /// Processes every event with time <= t.
  void run_until(double t);
  double now() const;

  std::optional<NodeId> node_id(const std::string& name) const;
  LinkState link_state(NodeId a, NodeId b) const;
  /// Queues a broadcast (no `to`) or unicast from `from` at the current time.
  void transmit(NodeId from, const Message& msg, std::optional<NodeId> to = std::nullopt);

  const SimResult& result() const;
  SimResult finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ivc
