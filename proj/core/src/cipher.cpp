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

#include <boost/crc.hpp>

#include "ivc/error.hpp"
#include "ivc/mfs.hpp"

namespace ivc {

namespace {

constexpr std::size_t kChecksumBytes = 4;
constexpr std::size_t kPadBytes = 64;

std::uint32_t crc32(const Bytes& data) {
  boost::crc_32_type crc;
  crc.process_bytes(data.data(), data.size());
  return crc.checksum();
}

}  // namespace

// The pad is 64 bytes of a splitmix64 stream seeded from an FNV-1a hash of
// the key; it repeats every 64 bytes.
XorCrcSuite::XorCrcSuite(Bytes key) {
  if (key.empty()) throw DomainError("xor-crc32 suite needs a non-empty key");
  std::uint64_t state = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : key) {
    state ^= b;
    state *= 0x100000001b3ULL;
  }
  pad_.reserve(kPadBytes);
  while (pad_.size() < kPadBytes) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    for (int i = 0; i < 8; ++i) pad_.push_back(static_cast<std::uint8_t>(z >> (8 * i)));
  }
}

Bytes XorCrcSuite::encrypt(const Bytes& plain) const {
  Bytes out(plain.size() + kChecksumBytes);
  for (std::size_t i = 0; i < plain.size(); ++i) out[i] = plain[i] ^ pad_[i % pad_.size()];
  const std::uint32_t sum = crc32(plain);
  for (std::size_t i = 0; i < kChecksumBytes; ++i) {
    out[plain.size() + i] = static_cast<std::uint8_t>(sum >> (8 * (kChecksumBytes - 1 - i)));
  }
  return out;
}

Bytes XorCrcSuite::decrypt(const Bytes& sealed) const {
  if (sealed.size() < kChecksumBytes) throw TamperError("sealed message shorter than its checksum");
  const std::size_t n = sealed.size() - kChecksumBytes;
  Bytes plain(n);
  for (std::size_t i = 0; i < n; ++i) plain[i] = sealed[i] ^ pad_[i % pad_.size()];
  std::uint32_t stored = 0;
  for (std::size_t i = 0; i < kChecksumBytes; ++i) stored = (stored << 8) | sealed[n + i];
  if (stored != crc32(plain)) throw TamperError("checksum mismatch");
  return plain;
}

std::unique_ptr<CipherSuite> make_cipher_suite(std::string_view name, const Bytes& key) {
  if (name == "identity") return std::make_unique<IdentitySuite>();
  if (name == "xor-crc32") return std::make_unique<XorCrcSuite>(key);
  throw LookupError("unknown cipher suite '" + std::string(name) + "'");
}

std::vector<std::string> cipher_suite_names() { return {"identity", "xor-crc32"}; }

Bytes seal(const Message& msg, const CipherSuite& suite) {
  const std::string wire = format_message(msg);
  return suite.encrypt(Bytes(wire.begin(), wire.end()));
}

Message open(const Bytes& sealed, const CipherSuite& suite) {
  const Bytes plain = suite.decrypt(sealed);
  try {
    return parse_message(std::string(plain.begin(), plain.end()));
  } catch (const ParseError& e) {
    throw TamperError(std::string("undecodable wire form: ") + e.what());
  }
}

}  // namespace ivc
