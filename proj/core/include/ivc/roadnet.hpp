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

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ivc/geometry.hpp"

namespace ivc {

/// Address of one directed road segment, written "<road_id>-<road_name>-<segment_id>".
struct SegmentLocator {
  std::int64_t road_id = 0;
  std::string road_name;
  std::int64_t segment_id = 0;

  friend bool operator==(const SegmentLocator&, const SegmentLocator&) = default;
  // (road_id, segment_id) order; the name only separates locators that
  // cannot both resolve.
  friend auto operator<=>(const SegmentLocator& a, const SegmentLocator& b) {
    if (auto c = a.road_id <=> b.road_id; c != 0) return c;
    if (auto c = a.segment_id <=> b.segment_id; c != 0) return c;
    return a.road_name <=> b.road_name;
  }
};

/// Road names are lowercase slugs: [a-z0-9_]+.
bool is_road_name_token(std::string_view name);

/// Parses "5-william-2". Leading zeros in the numeric parts are accepted and
/// dropped by format_locator. Throws ParseError naming the bad component.
SegmentLocator parse_locator(std::string_view text);
std::string format_locator(const SegmentLocator& loc);

/// One travel direction of a stretch of road. Vehicles move along the
/// polyline in point order.
class Segment {
 public:
  Segment(std::int64_t segment_id, std::vector<Point> polyline);

  std::int64_t id() const { return id_; }
  const std::vector<Point>& polyline() const { return polyline_; }
  double length() const { return length_; }
  const Point& start() const { return polyline_.front(); }
  const Point& end() const { return polyline_.back(); }

  /// Point at arc length `s` from the start, clamped to [0, length].
  Point point_at(double s) const;
  /// Unit travel direction at arc length `s`.
  Vec2 heading_at(double s) const;
  /// Arc length of the point on the polyline closest to p.
  double project(const Point& p) const;
  /// Length-weighted centroid of the polyline.
  Point centroid() const;

 private:
  std::int64_t id_;
  std::vector<Point> polyline_;
  std::vector<double> cumulative_;  // arc length at each vertex
  double length_ = 0.0;
};

struct Road {
  std::int64_t road_id = 0;
  std::string name;
  std::vector<Segment> segments;
};

/// Ordered sequence of adjacent segments.
struct RoutePath {
  std::vector<SegmentLocator> segments;
  /// Sum of the lengths of every segment after the first.
  double length = 0.0;
};

// Immutable once built. All lookups are const and safe to share between
// simulation instances.
class RoadNetwork {
 public:
  /// Segment endpoints closer than this are treated as connected.
  static constexpr double kAdjacencyTolerance = 0.5;

  RoadNetwork() = default;
  explicit RoadNetwork(std::vector<Road> roads);

  const std::vector<Road>& roads() const { return roads_; }

  /// Throws LookupError for an unknown id, a name that does not match the
  /// registered road, or a missing segment.
  const Segment& resolve(const SegmentLocator& loc) const;
  bool contains(const SegmentLocator& loc) const;

  /// Nearest segment within `tolerance`; exact ties go to the lower
  /// (road_id, segment_id). Throws LookupError when off-network.
  SegmentLocator locate_point(const Point& p, double tolerance) const;

  /// True when `to` can be entered directly from the end of `from`.
  bool adjacent(const SegmentLocator& from, const SegmentLocator& to) const;
  /// Successors of a segment in (road_id, segment_id) order.
  std::vector<SegmentLocator> successors(const SegmentLocator& from) const;

  /// Up to k loop-free paths, shortest first. Unreachable gives an empty list.
  std::vector<RoutePath> routes_between(const SegmentLocator& from, const SegmentLocator& to,
                                        std::size_t k) const;

  /// Every locator in the network, sorted.
  std::vector<SegmentLocator> all_locators() const;

 private:
  struct Entry {
    std::size_t road;
    std::size_t segment;
  };
  const Entry* find(const SegmentLocator& loc) const;
  std::optional<RoutePath> shortest_path(const SegmentLocator& from, const SegmentLocator& to,
                                         const std::vector<SegmentLocator>& banned_nodes,
                                         const std::vector<std::pair<SegmentLocator, SegmentLocator>>&
                                             banned_edges) const;
  double path_length(const std::vector<SegmentLocator>& segs) const;

  std::vector<Road> roads_;
  std::map<std::int64_t, std::size_t> road_index_;
  std::map<std::pair<std::int64_t, std::int64_t>, Entry> segments_;
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<SegmentLocator>> successors_;
};

}  // namespace ivc
