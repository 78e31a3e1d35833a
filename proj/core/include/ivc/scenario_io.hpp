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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "ivc/roadnet.hpp"
#include "ivc/simkernel.hpp"

namespace ivc {

// YAML loaders. Problems are reported as "<origin>:<line>: <what>" through
// ParseError (malformed YAML) or ValidationError (well-formed but wrong).

RoadNetwork parse_network_yaml(std::string_view text, const std::string& origin = "<network>");
RoadNetwork load_network(const std::filesystem::path& path);

/// Relative `network:` paths resolve against `base_dir`.
Scenario parse_scenario_yaml(std::string_view text, const std::filesystem::path& base_dir,
                             const std::string& origin = "<scenario>");
/// Loads and runs validate_scenario; throws ValidationError listing every
/// problem.
Scenario load_scenario(const std::filesystem::path& path);

// -- CSV output ----------------------------------------------------------------

/// time,seq,node,kind,msg_id,detail
void write_trace_csv(std::ostream& out, const SimResult& result);
/// scope,name,type,tx,rx,deliveries,duplicates,suppressions,expiry_drops,count_drops,first_delivery_latency
void write_metrics_csv(std::ostream& out, const SimResult& result);
/// time,station,user,service,verdict,reason
void write_decisions_csv(std::ostream& out, const SimResult& result);
/// resolved_at,resolver,query_id,query_creator,target,delivered_at,body
void write_replies_csv(std::ostream& out, const SimResult& result);
/// a,b,begin,end,duration
void write_contacts_csv(std::ostream& out, const SimResult& result);

/// Writes trace.csv, metrics.csv, decisions.csv, replies.csv and contacts.csv
/// into `dir`, creating it when needed.
void write_run_outputs(const std::filesystem::path& dir, const SimResult& result);

/// RFC 4180 quoting when the field needs it.
std::string csv_field(std::string_view text);

}  // namespace ivc
