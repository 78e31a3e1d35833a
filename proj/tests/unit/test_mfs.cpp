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

#include <random>

#include "ivc/error.hpp"
#include "ivc/mfs.hpp"
#include "msg_gen.hpp"

using namespace ivc;

namespace {

constexpr std::string_view kAlert = "alert/11-newton-7/john3/6-king-1/john/092310/10000/NULL/accident";

std::string diag(std::string_view uri) {
  try {
    parse_message(uri);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "no error";
}

}  // namespace

TEST_SUITE("mfs") {

TEST_CASE("alert example parses to its fields") {
  const Message m = parse_message(kAlert);
  CHECK(m.type == MsgType::kAlert);
  CHECK(m.target == SegmentLocator{11, "newton", 7});
  CHECK(m.id == "john3");
  CHECK(m.source == SegmentLocator{6, "king", 1});
  CHECK(m.creator == "john");
  CHECK(m.time == WallTime(9, 23, 10));
  CHECK(m.expire == 10000u);
  CHECK_FALSE(m.count);
  CHECK(m.body == "accident");
  CHECK(format_message(m) == kAlert);
}

TEST_CASE("eight-field query is rejected at the creator/time boundary") {
  const auto d = diag("query/5-william-2/nevirvj1/2-hilton-9/nevirvj101523/5000/NULL/NULL");
  CHECK(d.rfind("field-count:", 0) == 0);
  CHECK(d.find("5/6 boundary") != std::string::npos);
  const Message fixed = parse_message("query/5-william-2/nevirvj1/2-hilton-9/nevirvj/101523/5000/NULL/NULL");
  CHECK(fixed.expire == 5000u);
  CHECK_FALSE(fixed.count);
  CHECK_FALSE(fixed.body);
  CHECK(fixed.time == WallTime(10, 15, 23));
}

TEST_CASE("diagnostics start with the failing check") {
  CHECK(diag("").rfind("empty:", 0) == 0);
  CHECK(diag("query/a/b").rfind("field-count:", 0) == 0);
  CHECK(diag("notice/1-a-1/i/1-a-1/c/000000/NULL/NULL/NULL").rfind("type:", 0) == 0);
  CHECK(diag("alert/1-a-1/i/1-a-1/c/246000/NULL/NULL/NULL").rfind("time:", 0) == 0);
  CHECK(diag("alert/1-a-1/i/1-a-1/c/12345/NULL/NULL/NULL").rfind("time:", 0) == 0);
  CHECK(diag("alert/1-a-1/i/1-a-1/c/120000/-5/NULL/NULL").rfind("negative:", 0) == 0);
  CHECK(diag("alert/1-a-1/i/1-a-1/c/120000/5x/NULL/NULL").rfind("number:", 0) == 0);
  CHECK(diag("alert/1-A-1/i/1-a-1/c/120000/NULL/NULL/NULL").rfind("locator:", 0) == 0);
  CHECK(diag("alert/1-a-1//1-a-1/c/120000/NULL/NULL/NULL").rfind("empty-field:", 0) == 0);
  CHECK(diag("alert/1-a-1/i/1-a-1/c/120000/NULL/NULL/").rfind("empty-field:", 0) == 0);
  CHECK(diag("alert/1-a-1/i/1-a-1/c/120000/NULL/NULL/%2").rfind("body:", 0) == 0);
  CHECK(diag("alert/1-a-1/i/1-a-1/c/120000/NULL/null/x").rfind("number:", 0) == 0);
}

TEST_CASE("body escaping") {
  Message m = parse_message(kAlert);
  m.body = "left/lane";
  CHECK(format_message(m).ends_with("/left%2Flane"));
  m.body = "100%";
  CHECK(format_message(m).ends_with("/100%25"));
  m.body = "NULL";
  const auto wire = format_message(m);
  CHECK(wire.ends_with("/%4EULL"));
  CHECK(parse_message(wire).body == "NULL");
  m.body = "";
  CHECK(format_message(m).ends_with("/NULL"));
  CHECK(decode_body("a%2fb") == "a/b");
}

TEST_CASE("format rejects broken records") {
  Message m = parse_message(kAlert);
  m.id = "a b";
  CHECK_THROWS_AS(format_message(m), ParseError);
  m = parse_message(kAlert);
  m.creator = "";
  CHECK_THROWS_AS(format_message(m), ParseError);
  m = parse_message(kAlert);
  m.target.road_name = "King";
  CHECK_THROWS_AS(format_message(m), ParseError);
}

TEST_CASE("round trip over generated messages") {
  std::mt19937_64 gen(20260101);
  for (int i = 0; i < 10000; ++i) {
    const Message m = testing::random_message(gen);
    const std::string wire = format_message(m);
    const Message back = parse_message(wire);
    REQUIRE(back == m);
    REQUIRE(format_message(back) == wire);
  }
}

TEST_CASE("expiry uses forward elapsed seconds") {
  Message m = parse_message(kAlert);
  CHECK_FALSE(is_expired(m, WallTime(9, 23, 10)));
  // 09:23:10 -> 12:10:00 is 2 h 46 min 50 s = 10010 s.
  CHECK(is_expired(m, WallTime(12, 10, 0)));
  CHECK_FALSE(is_expired(m, WallTime(12, 9, 50)));    // exactly 10000 s
  CHECK(is_expired(m, 9 * 3600 + 23 * 60 + 10 + 10000.5));
  m.time = WallTime(23, 0, 0);
  m.expire = 7200;
  CHECK_FALSE(is_expired(m, WallTime(0, 59, 59)));
  CHECK(is_expired(m, WallTime(1, 0, 1)));
  m.expire.reset();
  CHECK_FALSE(is_expired(m, WallTime(8, 0, 0)));
}

TEST_CASE("expiry is monotone over a day") {
  Message m = parse_message(kAlert);
  bool was = false;
  for (int s = 0; s < 86400; s += 7) {
    const bool now = is_expired(m, static_cast<double>(m.time.seconds_of_day() + s));
    CHECK((!was || now));
    was = now;
  }
}

TEST_CASE("count bookkeeping") {
  Message m = parse_message(kAlert);
  m.count = 3;
  CHECK(decrement_count(m).count == 2u);
  m.count = 0;
  CHECK_FALSE(is_forwardable(m));
  CHECK(decrement_count(m).count == 0u);
  m.count.reset();
  CHECK(is_forwardable(m));
  CHECK_FALSE(decrement_count(m).count);
}

TEST_CASE("wall time") {
  CHECK(WallTime::parse("092310").format() == "092310");
  CHECK(WallTime::from_seconds(-1).format() == "235959");
  CHECK(WallTime::from_seconds(86400 + 61).format() == "000101");
  CHECK_THROWS_AS(WallTime(24, 0, 0), DomainError);
  CHECK_THROWS_AS(WallTime::parse("0923100"), ParseError);
  CHECK(elapsed_since(WallTime(23, 59, 0), 30.0) == doctest::Approx(90.0));
}

TEST_CASE("every suite round trips") {
  std::mt19937_64 gen(7);
  const Bytes key{'k', 'e', 'y'};
  for (const auto& name : cipher_suite_names()) {
    const auto suite = make_cipher_suite(name, key);
    for (int i = 0; i < 500; ++i) {
      const Message m = testing::random_message(gen);
      CHECK(open(seal(m, *suite), *suite) == m);
    }
  }
  const Message m = parse_message(kAlert);
  const Bytes plain = seal(m, IdentitySuite{});
  CHECK(std::string(plain.begin(), plain.end()) == kAlert);
  CHECK_THROWS_AS(make_cipher_suite("rot13"), LookupError);
  CHECK_THROWS_AS(XorCrcSuite(Bytes{}), DomainError);
}

TEST_CASE("single bit flips are caught") {
  const XorCrcSuite suite(Bytes{1, 2, 3, 4, 5});
  std::mt19937_64 gen(99);
  const Bytes sealed = seal(parse_message(kAlert), suite);
  CHECK(Bytes(sealed.begin(), sealed.end() - 4) != Bytes(kAlert.begin(), kAlert.end()));
  std::uniform_int_distribution<std::size_t> pick(0, sealed.size() * 8 - 1);
  for (int i = 0; i < 1000; ++i) {
    Bytes bad = sealed;
    const std::size_t bit = pick(gen);
    bad[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    CHECK_THROWS_AS(open(bad, suite), TamperError);
  }
  CHECK_THROWS_AS(open(Bytes{1, 2}, suite), TamperError);
}

}
