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

#include "ivc/radio.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ivc/error.hpp"

namespace ivc {

void RadioProfile::validate() const {
  if (!(nominal_range > 0.0)) throw ValidationError("radio: nominal_range must be > 0");
  if (!(nominal_range <= measured_max_range)) {
    throw ValidationError("radio: nominal_range must not exceed measured_max_range");
  }
  if (!(discovery_mean >= 0.0)) throw ValidationError("radio: discovery_mean must be >= 0");
  if (!(discovery_jitter >= 0.0) || discovery_jitter > discovery_mean) {
    throw ValidationError("radio: discovery_jitter must lie in [0, discovery_mean]");
  }
  if (!(setup_time >= 0.0)) throw ValidationError("radio: setup_time must be >= 0");
}

bool in_range(const Pose& a, const Pose& b, const RadioProfile& profile, RangeMode mode) {
  if (std::abs(a.time - b.time) > 1e-9) {
    throw DomainError("in_range: poses taken at different times (" + std::to_string(a.time) + " vs " +
                      std::to_string(b.time) + ")");
  }
  const double range = mode == RangeMode::kNominal ? profile.nominal_range : profile.measured_max_range;
  return distance(a.position, b.position) <= range;
}

double sample_discovery(const RadioProfile& profile, Rng& rng) {
  const double lo = profile.discovery_mean - profile.discovery_jitter;
  const double hi = profile.discovery_mean + profile.discovery_jitter;
  return std::max(0.0, rng.uniform(lo, hi));
}

double effective_window(double contact_s, double discovery_s, double setup_s) {
  if (std::isinf(contact_s)) return kUnbounded;
  return std::max(0.0, contact_s - discovery_s - setup_s);
}

double effective_window(double contact_s, const RadioProfile& profile, Rng& rng) {
  if (std::isinf(contact_s)) return kUnbounded;
  return effective_window(contact_s, sample_discovery(profile, rng), profile.setup_time);
}

PiconetLayout form_piconets(const std::vector<PositionedNode>& nodes, const RadioProfile& profile) {
  std::vector<PositionedNode> sorted = nodes;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].id == sorted[i - 1].id) throw DomainError("form_piconets: duplicate node id");
    if (std::abs(sorted[i].pose.time - sorted[0].pose.time) > 1e-9) {
      throw DomainError("form_piconets: poses taken at different times");
    }
  }

  PiconetLayout layout;
  std::vector<bool> assigned(sorted.size(), false);
  std::map<NodeId, std::size_t> cluster_of;  // node id -> piconet index
  for (std::size_t m = 0; m < sorted.size(); ++m) {
    if (assigned[m]) continue;
    assigned[m] = true;
    Piconet net{sorted[m].id, {}};
    std::vector<std::pair<double, std::size_t>> candidates;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
      if (assigned[j]) continue;
      const double d = distance(sorted[m].pose.position, sorted[j].pose.position);
      if (d <= profile.nominal_range) candidates.emplace_back(d, j);
    }
    // Index order equals id order, so this sorts by (distance, id).
    std::sort(candidates.begin(), candidates.end());
    const std::size_t take = std::min(candidates.size(), profile.max_active_slaves);
    for (std::size_t c = 0; c < take; ++c) {
      const std::size_t j = candidates[c].second;
      assigned[j] = true;
      net.slaves.insert(sorted[j].id);
    }
    const std::size_t index = layout.piconets.size();
    cluster_of[net.master] = index;
    for (NodeId s : net.slaves) cluster_of[s] = index;
    layout.piconets.push_back(std::move(net));
  }

  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const NodeId id = sorted[i].id;
    const std::size_t own = cluster_of.at(id);
    if (layout.piconets[own].master == id) continue;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
      if (cluster_of.at(sorted[j].id) == own) continue;
      if (distance(sorted[i].pose.position, sorted[j].pose.position) <= profile.nominal_range) {
        layout.bridges.insert(id);
        break;
      }
    }
  }
  return layout;
}

}  // namespace ivc
