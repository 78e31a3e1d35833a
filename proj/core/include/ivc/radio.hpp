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
#include <set>
#include <string>
#include <vector>

#include "ivc/mobility.hpp"
#include "ivc/rng.hpp"

namespace ivc {

using NodeId = std::uint32_t;

/// Bluetooth-like link parameters for one device class.
struct RadioProfile {
  double nominal_range = 100.0;
  double measured_max_range = 225.0;
  double discovery_mean = 2.25;
  double discovery_jitter = 0.0;  // half-width of the uniform spread
  double setup_time = 0.75;
  std::size_t max_active_slaves = 7;

  /// Throws ValidationError on inconsistent values.
  void validate() const;
};

enum class RangeMode { kNominal, kMeasured };

/// Closed-ball test on poses taken at the same instant.
bool in_range(const Pose& a, const Pose& b, const RadioProfile& profile, RangeMode mode = RangeMode::kNominal);

/// Uniform in [mean - jitter, mean + jitter], clamped at zero.
double sample_discovery(const RadioProfile& profile, Rng& rng);

/// Contact time left for data once discovery and setup are paid.
double effective_window(double contact_s, const RadioProfile& profile, Rng& rng);
double effective_window(double contact_s, double discovery_s, double setup_s);

struct PositionedNode {
  NodeId id = 0;
  Pose pose;
};

struct Piconet {
  NodeId master = 0;  // also the cluster id
  std::set<NodeId> slaves;
  NodeId cluster_id() const { return master; }
};

struct PiconetLayout {
  std::vector<Piconet> piconets;  // in master id order
  std::set<NodeId> bridges;
};

/// Greedy clustering: the lowest unassigned id becomes master and takes up to
/// max_active_slaves nearest unassigned nodes in nominal range.
PiconetLayout form_piconets(const std::vector<PositionedNode>& nodes, const RadioProfile& profile);

}  // namespace ivc
