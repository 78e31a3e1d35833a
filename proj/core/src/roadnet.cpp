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

#include "ivc/roadnet.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <queue>
#include <set>
#include <tuple>

#include "ivc/error.hpp"

namespace ivc {

namespace {

std::int64_t parse_id(std::string_view part, const char* component, std::string_view whole) {
  std::int64_t value = 0;
  const auto* first = part.data();
  const auto* last = part.data() + part.size();
  if (part.empty() || !std::all_of(part.begin(), part.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw ParseError("locator '" + std::string(whole) + "': " + component + " '" + std::string(part) +
                     "' is not a non-negative integer");
  }
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError("locator '" + std::string(whole) + "': " + component + " '" + std::string(part) +
                     "' is out of range");
  }
  return value;
}

using Key = std::pair<std::int64_t, std::int64_t>;
Key key_of(const SegmentLocator& loc) { return {loc.road_id, loc.segment_id}; }

}  // namespace

bool is_road_name_token(std::string_view name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

SegmentLocator parse_locator(std::string_view text) {
  if (text.empty()) throw ParseError("locator is empty");
  const auto first = text.find('-');
  const auto second = first == std::string_view::npos ? first : text.find('-', first + 1);
  const auto extra = second == std::string_view::npos ? second : text.find('-', second + 1);
  if (first == std::string_view::npos || second == std::string_view::npos ||
      extra != std::string_view::npos) {
    const auto dashes = std::count(text.begin(), text.end(), '-');
    throw ParseError("locator '" + std::string(text) + "': expected 3 '-'-separated parts, found " +
                     std::to_string(dashes + 1));
  }
  SegmentLocator loc;
  loc.road_id = parse_id(text.substr(0, first), "road_id", text);
  const auto name = text.substr(first + 1, second - first - 1);
  if (!is_road_name_token(name)) {
    throw ParseError("locator '" + std::string(text) + "': road_name '" + std::string(name) +
                     "' is not a lowercase [a-z0-9_] token");
  }
  loc.road_name = std::string(name);
  loc.segment_id = parse_id(text.substr(second + 1), "segment_id", text);
  return loc;
}

std::string format_locator(const SegmentLocator& loc) {
  return std::to_string(loc.road_id) + "-" + loc.road_name + "-" + std::to_string(loc.segment_id);
}

// ---------------------------------------------------------------------------

Segment::Segment(std::int64_t segment_id, std::vector<Point> polyline)
    : id_(segment_id), polyline_(std::move(polyline)) {
  if (segment_id <= 0) throw ValidationError("segment id must be positive, got " + std::to_string(segment_id));
  if (polyline_.size() < 2) {
    throw ValidationError("segment " + std::to_string(segment_id) + " needs at least 2 points");
  }
  cumulative_.reserve(polyline_.size());
  cumulative_.push_back(0.0);
  for (std::size_t i = 1; i < polyline_.size(); ++i) {
    const double d = distance(polyline_[i - 1], polyline_[i]);
    if (!(d > 0.0)) {
      throw ValidationError("segment " + std::to_string(segment_id) + " has repeated point at index " +
                            std::to_string(i));
    }
    length_ += d;
    cumulative_.push_back(length_);
  }
}

Point Segment::point_at(double s) const {
  if (s <= 0.0) return polyline_.front();
  if (s >= length_) return polyline_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const auto i = static_cast<std::size_t>(it - cumulative_.begin());
  const Point& a = polyline_[i - 1];
  const Point& b = polyline_[i];
  const double edge = cumulative_[i] - cumulative_[i - 1];
  const double t = (s - cumulative_[i - 1]) / edge;
  return a + t * (b - a);
}

Vec2 Segment::heading_at(double s) const {
  std::size_t i = 1;
  if (s > 0.0) {
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    i = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), polyline_.size() - 1);
  }
  const Vec2 d = polyline_[i] - polyline_[i - 1];
  const double n = norm(d);
  return {d.x / n, d.y / n};
}

double Segment::project(const Point& p) const {
  double best_d = INFINITY;
  double best_s = 0.0;
  for (std::size_t i = 1; i < polyline_.size(); ++i) {
    const Point c = closest_on_segment(p, polyline_[i - 1], polyline_[i]);
    const double d = distance(p, c);
    if (d < best_d) {
      best_d = d;
      best_s = cumulative_[i - 1] + distance(polyline_[i - 1], c);
    }
  }
  return best_s;
}

Point Segment::centroid() const {
  double cx = 0.0;
  double cy = 0.0;
  for (std::size_t i = 1; i < polyline_.size(); ++i) {
    const double w = cumulative_[i] - cumulative_[i - 1];
    cx += w * 0.5 * (polyline_[i - 1].x + polyline_[i].x);
    cy += w * 0.5 * (polyline_[i - 1].y + polyline_[i].y);
  }
  return {cx / length_, cy / length_};
}

// ---------------------------------------------------------------------------

RoadNetwork::RoadNetwork(std::vector<Road> roads) : roads_(std::move(roads)) {
  std::sort(roads_.begin(), roads_.end(), [](const Road& a, const Road& b) { return a.road_id < b.road_id; });
  for (std::size_t r = 0; r < roads_.size(); ++r) {
    auto& road = roads_[r];
    if (road.road_id <= 0) {
      throw ValidationError("road id must be positive, got " + std::to_string(road.road_id));
    }
    if (!is_road_name_token(road.name)) {
      throw ValidationError("road " + std::to_string(road.road_id) + ": name '" + road.name +
                            "' is not a lowercase [a-z0-9_] token");
    }
    if (!road_index_.emplace(road.road_id, r).second) {
      throw ValidationError("duplicate road id " + std::to_string(road.road_id));
    }
    std::sort(road.segments.begin(), road.segments.end(),
              [](const Segment& a, const Segment& b) { return a.id() < b.id(); });
    for (std::size_t s = 0; s < road.segments.size(); ++s) {
      if (!segments_.emplace(Key{road.road_id, road.segments[s].id()}, Entry{r, s}).second) {
        throw ValidationError("road " + std::to_string(road.road_id) + ": duplicate segment id " +
                              std::to_string(road.segments[s].id()));
      }
    }
  }

  // Directed adjacency: end of `from` meets start of `to`. Driving straight
  // back along the reverse of the same road is not a turn we model.
  for (const auto& [from_key, from] : segments_) {
    const Segment& a = roads_[from.road].segments[from.segment];
    auto& out = successors_[from_key];
    for (const auto& [to_key, to] : segments_) {
      if (to_key == from_key) continue;
      const Segment& b = roads_[to.road].segments[to.segment];
      if (distance(a.end(), b.start()) > kAdjacencyTolerance) continue;
      const bool u_turn = from.road == to.road && distance(a.start(), b.end()) <= kAdjacencyTolerance;
      if (u_turn) continue;
      out.push_back({to_key.first, roads_[to.road].name, to_key.second});
    }
  }
}

const RoadNetwork::Entry* RoadNetwork::find(const SegmentLocator& loc) const {
  const auto it = segments_.find(key_of(loc));
  if (it == segments_.end()) return nullptr;
  if (roads_[it->second.road].name != loc.road_name) return nullptr;
  return &it->second;
}

const Segment& RoadNetwork::resolve(const SegmentLocator& loc) const {
  const auto road = road_index_.find(loc.road_id);
  if (road == road_index_.end()) {
    throw LookupError("locator " + format_locator(loc) + ": unknown road_id " + std::to_string(loc.road_id));
  }
  const Road& r = roads_[road->second];
  if (r.name != loc.road_name) {
    throw LookupError("locator " + format_locator(loc) + ": road " + std::to_string(loc.road_id) +
                      " is named '" + r.name + "', not '" + loc.road_name + "'");
  }
  const auto seg = segments_.find(key_of(loc));
  if (seg == segments_.end()) {
    throw LookupError("locator " + format_locator(loc) + ": road " + std::to_string(loc.road_id) +
                      " has no segment " + std::to_string(loc.segment_id));
  }
  return r.segments[seg->second.segment];
}

bool RoadNetwork::contains(const SegmentLocator& loc) const { return find(loc) != nullptr; }

SegmentLocator RoadNetwork::locate_point(const Point& p, double tolerance) const {
  if (!(tolerance > 0.0)) throw DomainError("locate_point: tolerance must be positive");
  const Entry* best = nullptr;
  double best_d = INFINITY;
  for (const auto& [key, entry] : segments_) {  // ascending (road_id, segment_id)
    const double d = distance_to_polyline(p, roads_[entry.road].segments[entry.segment].polyline());
    if (d < best_d) {
      best_d = d;
      best = &entry;
    }
  }
  if (best == nullptr || best_d > tolerance) {
    throw LookupError("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                      ") is off-network: no segment within " + std::to_string(tolerance) + " m");
  }
  const Road& r = roads_[best->road];
  return {r.road_id, r.name, r.segments[best->segment].id()};
}

bool RoadNetwork::adjacent(const SegmentLocator& from, const SegmentLocator& to) const {
  const auto it = successors_.find(key_of(from));
  if (it == successors_.end()) return false;
  return std::find(it->second.begin(), it->second.end(), to) != it->second.end();
}

std::vector<SegmentLocator> RoadNetwork::successors(const SegmentLocator& from) const {
  const auto it = successors_.find(key_of(from));
  return it == successors_.end() ? std::vector<SegmentLocator>{} : it->second;
}

std::vector<SegmentLocator> RoadNetwork::all_locators() const {
  std::vector<SegmentLocator> out;
  out.reserve(segments_.size());
  for (const auto& [key, entry] : segments_) out.push_back({key.first, roads_[entry.road].name, key.second});
  return out;
}

double RoadNetwork::path_length(const std::vector<SegmentLocator>& segs) const {
  double total = 0.0;
  for (std::size_t i = 1; i < segs.size(); ++i) total += resolve(segs[i]).length();
  return total;
}

// Dijkstra over segments; entering a segment costs its length. Ties are
// broken on the locator so the result never depends on container order.
std::optional<RoutePath> RoadNetwork::shortest_path(
    const SegmentLocator& from, const SegmentLocator& to, const std::vector<SegmentLocator>& banned_nodes,
    const std::vector<std::pair<SegmentLocator, SegmentLocator>>& banned_edges) const {
  using Item = std::tuple<double, SegmentLocator>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  std::map<SegmentLocator, double> dist;
  std::map<SegmentLocator, SegmentLocator> prev;
  const std::set<SegmentLocator> banned(banned_nodes.begin(), banned_nodes.end());
  const std::set<std::pair<SegmentLocator, SegmentLocator>> banned_e(banned_edges.begin(), banned_edges.end());

  dist[from] = 0.0;
  open.emplace(0.0, from);
  std::set<SegmentLocator> done;
  while (!open.empty()) {
    auto [d, u] = open.top();
    open.pop();
    if (!done.insert(u).second) continue;
    if (u == to) break;
    for (const auto& v : successors(u)) {
      if (banned.count(v) || banned_e.count({u, v}) || done.count(v)) continue;
      const double nd = d + resolve(v).length();
      auto it = dist.find(v);
      if (it == dist.end() || nd < it->second || (nd == it->second && u < prev[v])) {
        dist[v] = nd;
        prev[v] = u;
        open.emplace(nd, v);
      }
    }
  }
  if (!done.count(to)) return std::nullopt;
  RoutePath path;
  for (SegmentLocator cur = to;; cur = prev.at(cur)) {
    path.segments.push_back(cur);
    if (cur == from) break;
  }
  std::reverse(path.segments.begin(), path.segments.end());
  path.length = dist.at(to);
  return path;
}

// Yen's k-shortest loop-free paths.
std::vector<RoutePath> RoadNetwork::routes_between(const SegmentLocator& from, const SegmentLocator& to,
                                                   std::size_t k) const {
  resolve(from);
  resolve(to);
  std::vector<RoutePath> found;
  if (k == 0) return found;
  if (from == to) {
    found.push_back({{from}, 0.0});
    return found;
  }
  auto first = shortest_path(from, to, {}, {});
  if (!first) return found;
  found.push_back(std::move(*first));

  auto candidate_less = [](const RoutePath& a, const RoutePath& b) {
    if (a.length != b.length) return a.length < b.length;
    return a.segments < b.segments;
  };
  std::vector<RoutePath> candidates;

  while (found.size() < k) {
    const auto& last = found.back().segments;
    for (std::size_t i = 0; i + 1 < last.size(); ++i) {
      const SegmentLocator& spur = last[i];
      const std::vector<SegmentLocator> root(last.begin(), last.begin() + static_cast<long>(i) + 1);

      std::vector<std::pair<SegmentLocator, SegmentLocator>> banned_edges;
      for (const auto& p : found) {
        if (p.segments.size() > i + 1 && std::equal(root.begin(), root.end(), p.segments.begin())) {
          banned_edges.emplace_back(p.segments[i], p.segments[i + 1]);
        }
      }
      std::vector<SegmentLocator> banned_nodes(root.begin(), root.end() - 1);

      auto spur_path = shortest_path(spur, to, banned_nodes, banned_edges);
      if (!spur_path) continue;
      RoutePath total;
      total.segments = root;
      total.segments.insert(total.segments.end(), spur_path->segments.begin() + 1, spur_path->segments.end());
      total.length = path_length(total.segments);
      const bool known =
          std::any_of(found.begin(), found.end(), [&](const RoutePath& p) { return p.segments == total.segments; }) ||
          std::any_of(candidates.begin(), candidates.end(),
                      [&](const RoutePath& p) { return p.segments == total.segments; });
      if (!known) candidates.push_back(std::move(total));
    }
    if (candidates.empty()) break;
    auto best = std::min_element(candidates.begin(), candidates.end(), candidate_less);
    found.push_back(std::move(*best));
    candidates.erase(best);
  }
  return found;
}

}  // namespace ivc
