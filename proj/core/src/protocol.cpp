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

#include "ivc/protocol.hpp"

#include "ivc/error.hpp"

namespace ivc {

std::string_view to_string(Action a) {
  switch (a) {
    case Action::kScheduleRebroadcast:
      return "schedule_rebroadcast";
    case Action::kCancelRebroadcast:
      return "cancel_rebroadcast";
    case Action::kForwardGeographic:
      return "forward_geographic";
    case Action::kNone:
      return "none";
  }
  return "none";
}

std::string_view to_string(DropReason r) {
  return r == DropReason::kExpired ? "expired" : "count-exhausted";
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::kAcknowledged:
      return "acknowledged";
    case StopReason::kExpired:
      return "expired";
    case StopReason::kCountExhausted:
      return "count-exhausted";
    case StopReason::kRetryLimit:
      return "retry-limit";
  }
  return "retry-limit";
}

std::optional<double> ForwardingState::first_receipt(const std::string& id) const {
  const auto it = seen_.find(id);
  if (it == seen_.end()) return std::nullopt;
  return it->second;
}

const PendingTx* ForwardingState::pending(const std::string& id) const {
  const auto it = pending_.find(id);
  return it == pending_.end() ? nullptr : &it->second;
}

void ForwardingState::originate(const Message& msg, double now, const ProtocolConfig& cfg) {
  seen_.emplace(msg.id, now);
  if (cfg.retry_limit == 0) return;
  pending_[msg.id] = PendingTx{msg, now, cfg.retry_limit, true};
}

struct ProtocolOps {
  static RxOutcome receive(ForwardingState& s, const Message& msg, const RxContext& ctx, const ProtocolConfig& cfg) {
    RxOutcome out;
    if (is_expired(msg, ctx.wall_seconds)) {
      out.drop = DropReason::kExpired;
      return out;
    }
    if (s.seen(msg.id)) {
      out.duplicate = true;
      // Any copy heard from behind means someone further back has it.
      if (cfg.suppression && is_from_behind(ctx)) {
        out.implicit_ack = true;
        if (s.pending_.erase(msg.id) > 0) out.actions.push_back(Action::kCancelRebroadcast);
        s.acked_.insert(msg.id);
      }
      if (out.actions.empty()) out.actions.push_back(Action::kNone);
      return out;
    }
    if (cfg.count_mode == CountMode::kPerRecipient && !is_forwardable(msg)) {
      out.drop = DropReason::kCountExhausted;
      return out;
    }

    s.seen_.emplace(msg.id, ctx.time);
    out.deliver = true;
    // In per-hop mode receipt is free; the unit is spent on forwarding.
    out.accepted = cfg.count_mode == CountMode::kPerHop ? msg : decrement_count(msg);
    switch (msg.type) {
      case MsgType::kAlert:
        if (is_forwardable(out.accepted)) {
          // Relays forward once; only the originator repeats.
          s.pending_[msg.id] = PendingTx{out.accepted, ctx.time, 1, false};
          out.actions.push_back(Action::kScheduleRebroadcast);
        } else {
          out.actions.push_back(Action::kNone);
        }
        break;
      case MsgType::kQuery:
        out.actions.push_back(is_forwardable(out.accepted) ? Action::kForwardGeographic : Action::kNone);
        break;
      case MsgType::kService:
        out.actions.push_back(Action::kNone);
        break;
    }
    return out;
  }

  static TxDecision tick(ForwardingState& s, const std::string& id, double now, double wall, const ProtocolConfig& cfg) {
    TxDecision d;
    auto it = s.pending_.find(id);
    if (it == s.pending_.end()) return d;
    PendingTx& p = it->second;
    if (p.next_tx > now + 1e-9) {
      d.next_tx = p.next_tx;
      return d;
    }
    auto stop = [&](StopReason r) {
      s.pending_.erase(it);
      d.stopped = r;
      return d;
    };
    if (s.acked(id)) return stop(StopReason::kAcknowledged);
    if (is_expired(p.message, wall)) return stop(StopReason::kExpired);
    Message on_air = p.message;
    if (cfg.count_mode == CountMode::kPerHop && !p.originator) {
      if (!is_forwardable(on_air)) return stop(StopReason::kCountExhausted);
      on_air = decrement_count(on_air);
    } else if (!is_forwardable(on_air)) {
      return stop(StopReason::kCountExhausted);
    }
    if (p.remaining == 0) return stop(StopReason::kRetryLimit);

    d.transmit = std::move(on_air);
    --p.remaining;
    if (p.remaining == 0) {
      s.pending_.erase(it);
      d.stopped = StopReason::kRetryLimit;
    } else {
      p.next_tx = now + cfg.retry_interval;
      d.next_tx = p.next_tx;
    }
    return d;
  }
};

bool is_from_behind(const RxContext& ctx) {
  if (ctx.receiver_heading.x == 0.0 && ctx.receiver_heading.y == 0.0) {
    throw DomainError("is_from_behind: receiver heading is zero");
  }
  return dot(ctx.sender_position - ctx.receiver_position, ctx.receiver_heading) < 0.0;
}

RxOutcome on_receive(ForwardingState& state, const Message& msg, const RxContext& ctx, const ProtocolConfig& cfg) {
  return ProtocolOps::receive(state, msg, ctx, cfg);
}

TxDecision rebroadcast_policy(ForwardingState& state, const std::string& msg_id, double now, double wall_seconds,
                              const ProtocolConfig& cfg) {
  return ProtocolOps::tick(state, msg_id, now, wall_seconds, cfg);
}

std::optional<NodeId> next_hop_geographic(const Point& self, std::span<const Neighbor> neighbors,
                                          const Point& target) {
  const double own = distance(self, target);
  std::optional<NodeId> best;
  double best_d = own;
  for (const Neighbor& n : neighbors) {
    const double d = distance(n.position, target);
    if (d >= own) continue;
    if (!best || d < best_d || (d == best_d && n.id < *best)) {
      best = n.id;
      best_d = d;
    }
  }
  return best;
}

}  // namespace ivc
