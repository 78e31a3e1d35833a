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

#include "ivc/mfs.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include "ivc/error.hpp"

namespace ivc {

namespace {

constexpr std::string_view kNull = "NULL";
constexpr std::array<std::string_view, 9> kFieldNames{"TYPE",    "TARGET",  "ID",    "SOURCE", "CREATOR",
                                                      "TIME",    "EXPIRES", "COUNT", "BODY"};

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string field_label(std::size_t index) {
  return "field " + std::to_string(index + 1) + " (" + std::string(kFieldNames[index]) + ")";
}

std::optional<std::uint64_t> parse_nullable_count(std::string_view text, std::size_t index) {
  if (text == kNull) return std::nullopt;
  if (!text.empty() && text.front() == '-') {
    throw ParseError("negative: " + field_label(index) + " must be non-negative, got '" + std::string(text) + "'");
  }
  if (!all_digits(text)) {
    throw ParseError("number: " + field_label(index) + " must be digits or NULL, got '" + std::string(text) + "'");
  }
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("number: " + field_label(index) + " is out of range");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t begin = 0;
  while (true) {
    const auto pos = text.find(sep, begin);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(begin));
      return parts;
    }
    parts.push_back(text.substr(begin, pos - begin));
    begin = pos + 1;
  }
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

SegmentLocator parse_locator_field(std::string_view text, std::size_t index) {
  try {
    return parse_locator(text);
  } catch (const ParseError& e) {
    throw ParseError("locator: " + field_label(index) + ": " + e.what());
  }
}

}  // namespace

std::string_view to_string(MsgType type) {
  switch (type) {
    case MsgType::kQuery:
      return "query";
    case MsgType::kAlert:
      return "alert";
    case MsgType::kService:
      return "service";
  }
  return "query";
}

MsgType parse_msg_type(std::string_view text) {
  if (text == "query") return MsgType::kQuery;
  if (text == "alert") return MsgType::kAlert;
  if (text == "service") return MsgType::kService;
  throw ParseError("type: unknown message type '" + std::string(text) + "' (expected query, alert or service)");
}

// -- WallTime -----------------------------------------------------------------

WallTime::WallTime(int hours, int minutes, int seconds) {
  if (hours < 0 || hours >= 24 || minutes < 0 || minutes >= 60 || seconds < 0 || seconds >= 60) {
    throw DomainError("wall time out of range: " + std::to_string(hours) + ":" + std::to_string(minutes) + ":" +
                      std::to_string(seconds));
  }
  seconds_ = static_cast<std::int64_t>(hours) * 3600 + minutes * 60 + seconds;
}

WallTime WallTime::from_seconds(std::int64_t seconds_of_day) {
  WallTime t;
  t.seconds_ = ((seconds_of_day % kSecondsPerDay) + kSecondsPerDay) % kSecondsPerDay;
  return t;
}

WallTime WallTime::parse(std::string_view hhmmss) {
  if (hhmmss.size() != 6 || !all_digits(hhmmss)) {
    throw ParseError("time: expected 6 digits HHMMSS, got '" + std::string(hhmmss) + "'");
  }
  auto two = [&](std::size_t at) { return (hhmmss[at] - '0') * 10 + (hhmmss[at + 1] - '0'); };
  const int h = two(0);
  const int m = two(2);
  const int s = two(4);
  if (h >= 24 || m >= 60 || s >= 60) {
    throw ParseError("time: '" + std::string(hhmmss) + "' is not a valid 24 h clock time");
  }
  return WallTime(h, m, s);
}

std::string WallTime::format() const {
  std::string out(6, '0');
  const int parts[3] = {hours(), minutes(), seconds()};
  for (int i = 0; i < 3; ++i) {
    out[static_cast<std::size_t>(2 * i)] = static_cast<char>('0' + parts[i] / 10);
    out[static_cast<std::size_t>(2 * i + 1)] = static_cast<char>('0' + parts[i] % 10);
  }
  return out;
}

double elapsed_since(const WallTime& from, double to_seconds_of_day) {
  const double day = static_cast<double>(WallTime::kSecondsPerDay);
  double d = std::fmod(to_seconds_of_day - static_cast<double>(from.seconds_of_day()), day);
  if (d < 0.0) d += day;
  return d;
}

// -- Codec ----------------------------------------------------------------------

bool is_message_token(std::string_view token) {
  return !token.empty() && std::none_of(token.begin(), token.end(), [](char c) {
    return c == '/' || c == ' ' || c == '\t' || c == '\n' || c == '\r' || static_cast<unsigned char>(c) < 0x20;
  });
}

void validate_message(const Message& msg) {
  auto check_locator = [](const SegmentLocator& loc, std::size_t index) {
    if (loc.road_id < 0 || loc.segment_id < 0 || !is_road_name_token(loc.road_name)) {
      throw ParseError("locator: " + field_label(index) + " '" + format_locator(loc) + "' is malformed");
    }
  };
  check_locator(msg.target, 1);
  if (!is_message_token(msg.id)) throw ParseError("token: " + field_label(2) + " must be a non-empty token");
  check_locator(msg.source, 3);
  if (!is_message_token(msg.creator)) throw ParseError("token: " + field_label(4) + " must be a non-empty token");
}

std::string encode_body(std::string_view body) {
  if (body == kNull) return "%4EULL";
  std::string out;
  out.reserve(body.size());
  for (char c : body) {
    if (c == '/') {
      out += "%2F";
    } else if (c == '%') {
      out += "%25";
    } else {
      out += c;
    }
  }
  return out;
}

std::string decode_body(std::string_view wire) {
  std::string out;
  out.reserve(wire.size());
  for (std::size_t i = 0; i < wire.size(); ++i) {
    if (wire[i] != '%') {
      out += wire[i];
      continue;
    }
    if (i + 2 >= wire.size()) {
      throw ParseError("body: truncated percent escape at offset " + std::to_string(i));
    }
    const int hi = hex_value(wire[i + 1]);
    const int lo = hex_value(wire[i + 2]);
    if (hi < 0 || lo < 0) throw ParseError("body: bad percent escape at offset " + std::to_string(i));
    out += static_cast<char>(hi * 16 + lo);
    i += 2;
  }
  return out;
}

std::string format_message(const Message& msg) {
  validate_message(msg);
  auto nullable = [](const std::optional<std::uint64_t>& v) { return v ? std::to_string(*v) : std::string(kNull); };
  std::string out;
  out += to_string(msg.type);
  out += '/';
  out += format_locator(msg.target);
  out += '/';
  out += msg.id;
  out += '/';
  out += format_locator(msg.source);
  out += '/';
  out += msg.creator;
  out += '/';
  out += msg.time.format();
  out += '/';
  out += nullable(msg.expire);
  out += '/';
  out += nullable(msg.count);
  out += '/';
  out += msg.body && !msg.body->empty() ? encode_body(*msg.body) : std::string(kNull);
  return out;
}

Message parse_message(std::string_view uri) {
  if (uri.empty()) throw ParseError("empty: no message");
  const auto fields = split(uri, '/');
  if (fields.size() != kFieldNames.size()) {
    std::string diag = "field-count: expected 9 '/'-separated fields, got " + std::to_string(fields.size());
    // A creator directly followed by six clock digits means the CREATOR/TIME
    // separator is missing.
    if (fields.size() == kFieldNames.size() - 1) {
      const auto fused = fields[4];
      if (fused.size() > 6 && all_digits(fused.substr(fused.size() - 6))) {
        diag += "; field 5 (CREATOR) and field 6 (TIME) appear fused in '" + std::string(fused) +
                "' (missing '/' at the 5/6 boundary)";
      }
    }
    throw ParseError(diag);
  }
  for (std::size_t i = 0; i < 8; ++i) {
    if (fields[i].empty()) throw ParseError("empty-field: " + field_label(i) + " is empty");
  }

  Message msg;
  msg.type = parse_msg_type(fields[0]);
  msg.target = parse_locator_field(fields[1], 1);
  if (!is_message_token(fields[2])) throw ParseError("token: " + field_label(2) + " is not a valid token");
  msg.id = std::string(fields[2]);
  msg.source = parse_locator_field(fields[3], 3);
  if (!is_message_token(fields[4])) throw ParseError("token: " + field_label(4) + " is not a valid token");
  msg.creator = std::string(fields[4]);
  msg.time = WallTime::parse(fields[5]);
  msg.expire = parse_nullable_count(fields[6], 6);
  msg.count = parse_nullable_count(fields[7], 7);
  if (fields[8].empty()) throw ParseError("empty-field: " + field_label(8) + " is empty (use NULL)");
  if (fields[8] != kNull) msg.body = decode_body(fields[8]);
  return msg;
}

// -- Lifecycle ------------------------------------------------------------------

bool is_expired(const Message& msg, double now_seconds_of_day) {
  if (!msg.expire) return false;
  return elapsed_since(msg.time, now_seconds_of_day) > static_cast<double>(*msg.expire);
}

bool is_expired(const Message& msg, const WallTime& now) {
  return is_expired(msg, static_cast<double>(now.seconds_of_day()));
}

bool is_forwardable(const Message& msg) { return !msg.count || *msg.count > 0; }

Message decrement_count(Message msg) {
  if (msg.count && *msg.count > 0) --*msg.count;
  return msg;
}

}  // namespace ivc
