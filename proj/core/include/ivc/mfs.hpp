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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ivc/roadnet.hpp"

namespace ivc {

enum class MsgType { kQuery, kAlert, kService };

std::string_view to_string(MsgType type);
/// Throws ParseError for anything but "query", "alert" or "service".
MsgType parse_msg_type(std::string_view text);

/// Wall-clock time of day with whole-second resolution, written HHMMSS.
class WallTime {
 public:
  static constexpr std::int64_t kSecondsPerDay = 86400;

  WallTime() = default;
  /// Throws DomainError unless h < 24, m < 60, s < 60.
  WallTime(int hours, int minutes, int seconds);
  static WallTime from_seconds(std::int64_t seconds_of_day);
  /// Exactly six digits. Throws ParseError.
  static WallTime parse(std::string_view hhmmss);

  int hours() const { return static_cast<int>(seconds_ / 3600); }
  int minutes() const { return static_cast<int>(seconds_ / 60 % 60); }
  int seconds() const { return static_cast<int>(seconds_ % 60); }
  std::int64_t seconds_of_day() const { return seconds_; }
  std::string format() const;

  friend auto operator<=>(const WallTime&, const WallTime&) = default;

 private:
  std::int64_t seconds_ = 0;
};

/// Forward elapsed seconds from `from` to `to`, wrapping at most one midnight.
double elapsed_since(const WallTime& from, double to_seconds_of_day);

/// A record of the Message Format Specification. Optional fields are NULL on
/// the wire.
struct Message {
  MsgType type = MsgType::kQuery;
  SegmentLocator target;
  std::string id;
  SegmentLocator source;
  std::string creator;
  WallTime time;
  std::optional<std::uint64_t> expire;  // seconds after `time`
  std::optional<std::uint64_t> count;   // remaining recipients
  std::optional<std::string> body;

  friend bool operator==(const Message&, const Message&) = default;
};

/// Tokens (id, creator) are non-empty and free of '/' and whitespace.
bool is_message_token(std::string_view token);

/// Throws ParseError naming the first broken field.
void validate_message(const Message& msg);

/// Nine '/'-separated fields; NULL fields written "NULL"; '/' and '%' in the
/// body percent-encoded. Throws ParseError when the record is invalid.
std::string format_message(const Message& msg);

/// Strict inverse of format_message. Throws ParseError with a diagnostic that
/// starts with the failing check (e.g. "field-count: ...").
Message parse_message(std::string_view uri);

/// Percent-encoding used for the body field.
std::string encode_body(std::string_view body);
std::string decode_body(std::string_view wire);

/// True once more than `expire` seconds have passed since msg.time. A NULL
/// expire never expires. `now` may carry fractional seconds.
bool is_expired(const Message& msg, double now_seconds_of_day);
bool is_expired(const Message& msg, const WallTime& now);

/// A message with count 0 may not be handed to another vehicle.
bool is_forwardable(const Message& msg);
/// n > 0 -> n - 1; 0 and NULL unchanged.
Message decrement_count(Message msg);

// -- Encryption envelope ------------------------------------------------------

using Bytes = std::vector<std::uint8_t>;

class CipherSuite {
 public:
  virtual ~CipherSuite() = default;
  virtual std::string_view name() const = 0;
  virtual Bytes encrypt(const Bytes& plain) const = 0;
  /// Throws TamperError when the envelope does not verify.
  virtual Bytes decrypt(const Bytes& sealed) const = 0;
};

/// Plain UTF-8 wire form, no protection.
class IdentitySuite final : public CipherSuite {
 public:
  std::string_view name() const override { return "identity"; }
  Bytes encrypt(const Bytes& plain) const override { return plain; }
  Bytes decrypt(const Bytes& sealed) const override { return sealed; }
};

// NOT SECURE. Stand-in for a real cipher: the wire bytes are XORed with a
// pad obtained by repeating a stream expanded from the key, followed by the
// big-endian CRC-32 of the plaintext.
class XorCrcSuite final : public CipherSuite {
 public:
  /// Throws DomainError on an empty key.
  explicit XorCrcSuite(Bytes key);
  std::string_view name() const override { return "xor-crc32"; }
  Bytes encrypt(const Bytes& plain) const override;
  Bytes decrypt(const Bytes& sealed) const override;

 private:
  Bytes pad_;
};

/// "identity" or "xor-crc32". Throws LookupError for other names.
std::unique_ptr<CipherSuite> make_cipher_suite(std::string_view name, const Bytes& key = {});
std::vector<std::string> cipher_suite_names();

Bytes seal(const Message& msg, const CipherSuite& suite);
/// Throws TamperError on checksum failure or an undecodable wire form.
Message open(const Bytes& sealed, const CipherSuite& suite);

}  // namespace ivc
