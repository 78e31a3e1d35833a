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

#include <algorithm>

#include "ivc/error.hpp"
#include "ivc/protocol.hpp"

using namespace ivc;

namespace {

Message alert(std::optional<std::uint64_t> count = std::nullopt) {
  Message m = parse_message("alert/1-main-1/a-1/1-main-1/a/080000/300/NULL/accident");
  m.count = count;
  return m;
}

// Receiver at x = 0 heading +x; the sender sits at `sender_x`.
RxContext ctx(double sender_x, double t = 1.0) {
  return {{sender_x, 0.0}, {0.0, 0.0}, {1.0, 0.0}, t, 8 * 3600.0 + t};
}

bool has(const RxOutcome& o, Action a) { return std::find(o.actions.begin(), o.actions.end(), a) != o.actions.end(); }

}  // namespace

TEST_SUITE("protocol") {

TEST_CASE("first copy is delivered and relayed once") {
  ForwardingState s;
  ProtocolConfig cfg;
  const auto o = on_receive(s, alert(), ctx(50.0), cfg);
  CHECK(o.deliver);
  CHECK(has(o, Action::kScheduleRebroadcast));
  REQUIRE(s.pending("a-1"));
  CHECK(s.pending("a-1")->remaining == 1);
  CHECK_FALSE(s.pending("a-1")->originator);

  auto d = rebroadcast_policy(s, "a-1", 1.0, 8 * 3600.0 + 1.0, cfg);
  CHECK(d.transmit);
  CHECK(d.stopped == StopReason::kRetryLimit);
  CHECK_FALSE(s.pending("a-1"));
}

TEST_CASE("a copy from behind cancels the pending relay") {
  ForwardingState s;
  ProtocolConfig cfg;
  on_receive(s, alert(), ctx(50.0), cfg);
  const auto dup = on_receive(s, alert(), ctx(-40.0), cfg);
  CHECK(dup.duplicate);
  CHECK(dup.implicit_ack);
  CHECK(has(dup, Action::kCancelRebroadcast));
  CHECK_FALSE(s.pending("a-1"));
  CHECK(s.acked("a-1"));
}

TEST_CASE("a copy from ahead is only a duplicate") {
  ForwardingState s;
  ProtocolConfig cfg;
  on_receive(s, alert(), ctx(50.0), cfg);
  const auto dup = on_receive(s, alert(), ctx(60.0), cfg);
  CHECK(dup.duplicate);
  CHECK_FALSE(dup.implicit_ack);
  CHECK(s.pending("a-1"));
}

TEST_CASE("without suppression copies from behind change nothing") {
  ForwardingState s;
  ProtocolConfig cfg;
  cfg.suppression = false;
  on_receive(s, alert(), ctx(50.0), cfg);
  const auto dup = on_receive(s, alert(), ctx(-40.0), cfg);
  CHECK_FALSE(dup.implicit_ack);
  CHECK(s.pending("a-1"));
}

TEST_CASE("originator retries up to the limit at the retry interval") {
  ForwardingState s;
  ProtocolConfig cfg;
  cfg.retry_limit = 3;
  cfg.retry_interval = 2.0;
  s.originate(alert(), 0.0, cfg);
  std::vector<double> sent;
  double t = 0.0;
  for (int i = 0; i < 10; ++i) {
    const auto d = rebroadcast_policy(s, "a-1", t, 8 * 3600.0 + t, cfg);
    if (d.transmit) sent.push_back(t);
    if (!d.next_tx) break;
    t = *d.next_tx;
  }
  CHECK(sent == std::vector<double>{0.0, 2.0, 4.0});
}

TEST_CASE("expired messages are dropped on receipt and stop retrying") {
  ForwardingState s;
  ProtocolConfig cfg;
  RxContext late = ctx(50.0);
  late.wall_seconds = 8 * 3600.0 + 301.0;
  const auto o = on_receive(s, alert(), late, cfg);
  CHECK(o.drop == DropReason::kExpired);
  CHECK_FALSE(s.seen("a-1"));

  s.originate(alert(), 0.0, cfg);
  const auto d = rebroadcast_policy(s, "a-1", 0.0, 8 * 3600.0 + 300.5, cfg);
  CHECK_FALSE(d.transmit);
  CHECK(d.stopped == StopReason::kExpired);
}

TEST_CASE("per-recipient count") {
  ProtocolConfig cfg;
  ForwardingState a;
  const auto first = on_receive(a, alert(1), ctx(50.0), cfg);
  CHECK(first.deliver);
  CHECK(first.accepted.count == 0u);
  CHECK_FALSE(has(first, Action::kScheduleRebroadcast));
  ForwardingState b;
  const auto none = on_receive(b, alert(0), ctx(50.0), cfg);
  CHECK(none.drop == DropReason::kCountExhausted);
}

TEST_CASE("per-hop count spends on forwarding") {
  ProtocolConfig cfg;
  cfg.count_mode = CountMode::kPerHop;
  ForwardingState a;
  const auto o = on_receive(a, alert(1), ctx(50.0), cfg);
  CHECK(o.deliver);
  CHECK(o.accepted.count == 1u);
  const auto d = rebroadcast_policy(a, "a-1", 1.0, 8 * 3600.0 + 1.0, cfg);
  REQUIRE(d.transmit);
  CHECK(d.transmit->count == 0u);
  ForwardingState b;
  const auto last = on_receive(b, alert(0), ctx(50.0), cfg);
  CHECK(last.deliver);
  CHECK_FALSE(b.pending("a-1"));
}

TEST_CASE("queries are forwarded, service messages are not") {
  ProtocolConfig cfg;
  ForwardingState s;
  Message q = alert();
  q.type = MsgType::kQuery;
  q.id = "q-1";
  CHECK(has(on_receive(s, q, ctx(5.0), cfg), Action::kForwardGeographic));
  Message sv = alert();
  sv.type = MsgType::kService;
  sv.id = "s-1";
  CHECK(has(on_receive(s, sv, ctx(5.0), cfg), Action::kNone));
}

TEST_CASE("behind test needs a heading") {
  RxContext c = ctx(-1.0);
  CHECK(is_from_behind(c));
  c.sender_position = {0.0, 5.0};
  CHECK_FALSE(is_from_behind(c));
  c.receiver_heading = {0.0, 0.0};
  CHECK_THROWS_AS(is_from_behind(c), DomainError);
}

TEST_CASE("greedy next hop") {
  const std::vector<Neighbor> n{{3, {50, 0}}, {1, {50, 0}}, {2, {-20, 0}}, {4, {10, 5}}};
  CHECK(next_hop_geographic({0, 0}, n, {200, 0}) == 1u);
  CHECK_FALSE(next_hop_geographic({100, 0}, n, {200, 0}));
  CHECK(next_hop_geographic({0, 0}, n, {-200, 0}) == 2u);
  CHECK_FALSE(next_hop_geographic({0, 0}, {}, {5, 0}));
}

}
