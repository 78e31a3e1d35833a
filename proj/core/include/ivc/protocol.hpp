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
#include "ivc/radio.hpp"

namespace ivc {

enum class CountMode {
  kPerRecipient,  // every accepting vehicle spends one unit
  kPerHop,        // only forwarding spends a unit
};

struct ProtocolConfig {
  double retry_interval = 1.0;
  std::size_t retry_limit = 5;  // total transmissions by an originator
  bool suppression = true;      // honour implicit acknowledgements
  CountMode count_mode = CountMode::kPerRecipient;
};

struct RxContext {
  Point sender_position;
  Point receiver_position;
  Vec2 receiver_heading{1.0, 0.0};
  double time = 0.0;          // simulation seconds
  double wall_seconds = 0.0;  // seconds of day, may be fractional
};

enum class Action { kScheduleRebroadcast, kCancelRebroadcast, kForwardGeographic, kNone };
enum class DropReason { kExpired, kCountExhausted };
enum class StopReason { kAcknowledged, kExpired, kCountExhausted, kRetryLimit };

std::string_view to_string(Action a);
std::string_view to_string(DropReason r);
std::string_view to_string(StopReason r);

struct PendingTx {
  Message message;  // copy that goes on air
  double next_tx = 0.0;
  std::size_t remaining = 0;
  bool originator = false;
};

// Per-node bookkeeping for dissemination. Owned and mutated by exactly one
// node's handlers.
class ForwardingState {
 public:
  bool seen(const std::string& id) const { return seen_.count(id) > 0; }
  std::optional<double> first_receipt(const std::string& id) const;
  const PendingTx* pending(const std::string& id) const;
  bool acked(const std::string& id) const { return acked_.count(id) > 0; }
  std::size_t pending_count() const { return pending_.size(); }

  /// Registers a locally created message and schedules its first
  /// transmission at `now`.
  void originate(const Message& msg, double now, const ProtocolConfig& cfg);
  /// Marks an id as seen without scheduling anything (locally created
  /// queries and replies).
  void remember(const std::string& id, double now) { seen_.emplace(id, now); }

 private:
  friend struct ProtocolOps;
  std::map<std::string, double> seen_;
  std::map<std::string, PendingTx> pending_;
  std::set<std::string> acked_;
};

struct RxOutcome {
  bool deliver = false;
  bool duplicate = false;
  bool implicit_ack = false;
  std::optional<DropReason> drop;
  std::vector<Action> actions;
  Message accepted;  // the local copy after COUNT accounting (valid when deliver)
};

/// True iff the sender is strictly behind the receiver's direction of travel.
/// Throws DomainError on a zero heading.
bool is_from_behind(const RxContext& ctx);

RxOutcome on_receive(ForwardingState& state, const Message& msg, const RxContext& ctx, const ProtocolConfig& cfg);

struct TxDecision {
  std::optional<Message> transmit;
  std::optional<double> next_tx;  // set while the entry stays scheduled
  std::optional<StopReason> stopped;
};

/// Runs the retry schedule of `msg_id` at `now`. Transmits when due and
/// removes the entry on any stop condition.
TxDecision rebroadcast_policy(ForwardingState& state, const std::string& msg_id, double now, double wall_seconds,
                              const ProtocolConfig& cfg);

struct Neighbor {
  NodeId id = 0;
  Point position;
};

/// Greedy geographic next hop: the neighbour strictly closer to `target`
/// than `self`, closest first, ties by id. None at a local maximum.
std::optional<NodeId> next_hop_geographic(const Point& self, std::span<const Neighbor> neighbors,
                                          const Point& target);

}  // namespace ivc
