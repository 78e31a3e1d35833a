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
#include <iosfwd>
#include <string>
#include <vector>

#include "ivc/mobility.hpp"

namespace ivc {

/// Device classes measured for discovery time, with their configured means.
struct DiscoveryDevice {
  std::string name;
  double mean = 0.0;  // s
};
std::vector<DiscoveryDevice> default_discovery_devices();

struct DiscoveryRow {
  std::string device;
  double configured_mean = 0.0;
  double empirical_mean = 0.0;
  std::size_t samples = 0;
};

/// Draws `samples` discovery times per device from one seeded stream.
std::vector<DiscoveryRow> discovery_table(const std::vector<DiscoveryDevice>& devices, double jitter,
                                          std::size_t samples, std::uint64_t seed);

/// speed_kmh,speed_ms,duration_exact_s,duration_floor_s,paper_value_s,match
void write_in_range_csv(std::ostream& out, const std::vector<InRangeRow>& rows);
/// device,configured_mean,empirical_mean,n_samples
void write_discovery_csv(std::ostream& out, const std::vector<DiscoveryRow>& rows);

/// "OK <canonical>" or "ERR <diagnostic>" for one message URI.
struct ValidateLine {
  bool ok = false;
  std::string text;
};
ValidateLine validate_uri(std::string_view line);

}  // namespace ivc
