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

#include "ivc/analytics.hpp"

#include <ostream>

#include <fmt/format.h>

#include "ivc/error.hpp"
#include "ivc/mfs.hpp"
#include "ivc/radio.hpp"
#include "ivc/rng.hpp"

namespace ivc {

std::vector<DiscoveryDevice> default_discovery_devices() {
  return {{"device1", 2.25}, {"device2", 2.11}, {"device3", 2.33}, {"device4", 2.60}};
}

std::vector<DiscoveryRow> discovery_table(const std::vector<DiscoveryDevice>& devices, double jitter,
                                          std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw DomainError("discovery_table: need at least one sample");
  Rng rng(seed);
  std::vector<DiscoveryRow> rows;
  for (const auto& d : devices) {
    RadioProfile p;
    p.discovery_mean = d.mean;
    p.discovery_jitter = jitter;
    p.validate();
    double sum = 0.0;
    for (std::size_t i = 0; i < samples; ++i) sum += sample_discovery(p, rng);
    rows.push_back({d.name, d.mean, sum / static_cast<double>(samples), samples});
  }
  return rows;
}

void write_in_range_csv(std::ostream& out, const std::vector<InRangeRow>& rows) {
  out << "speed_kmh,speed_ms,duration_exact_s,duration_floor_s,paper_value_s,match\n";
  for (const auto& r : rows) {
    out << fmt::format("{:g},{:.1f},{:.3f},{},{},{}\n", r.speed_kmh, r.speed_ms, r.duration_exact, r.duration_floor,
                       r.published ? std::to_string(*r.published) : std::string(),
                       r.published ? (r.matches_published() ? "yes" : "no") : "");
  }
}

void write_discovery_csv(std::ostream& out, const std::vector<DiscoveryRow>& rows) {
  out << "device,configured_mean,empirical_mean,n_samples\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{:.2f},{:.4f},{}\n", r.device, r.configured_mean, r.empirical_mean, r.samples);
  }
}

ValidateLine validate_uri(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  try {
    return {true, "OK " + format_message(parse_message(line))};
  } catch (const Error& e) {
    return {false, std::string("ERR ") + e.what()};
  }
}

}  // namespace ivc
