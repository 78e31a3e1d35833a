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

#include <charconv>
#include <filesystem>
#include <future>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ivc/analytics.hpp"
#include "ivc/error.hpp"
#include "ivc/scenario_io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 2;

struct SeedRange {
  std::uint64_t first = 0;
  std::uint64_t last = 0;
};

SeedRange parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw CLI::ValidationError("--seeds", "expected A..B");
  SeedRange r;
  auto num = [&](std::string_view s, std::uint64_t& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || p != s.data() + s.size()) throw CLI::ValidationError("--seeds", "bad number '" + std::string(s) + "'");
  };
  num(std::string_view(text).substr(0, dots), r.first);
  num(std::string_view(text).substr(dots + 2), r.last);
  if (r.last < r.first) throw CLI::ValidationError("--seeds", "range is empty");
  return r;
}

int cmd_run(const std::string& cfg, std::optional<std::uint64_t> seed, const std::string& seeds, const fs::path& out) {
  ivc::Scenario sc;
  try {
    sc = ivc::load_scenario(cfg);
  } catch (const ivc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  if (seeds.empty()) {
    const auto result = ivc::run(sc, seed.value_or(sc.seed));
    ivc::write_run_outputs(out, result);
    std::cout << "wrote " << out.string() << " (" << result.trace.size() << " trace rows)\n";
    return 0;
  }
  const SeedRange range = parse_seed_range(seeds);
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::uint64_t> all;
  for (std::uint64_t s = range.first; s <= range.last; ++s) all.push_back(s);
  // Each replication owns its Simulation and output directory.
  for (std::size_t i = 0; i < all.size(); i += workers) {
    std::vector<std::future<void>> batch;
    for (std::size_t j = i; j < std::min(all.size(), i + workers); ++j) {
      const std::uint64_t s = all[j];
      batch.push_back(std::async(std::launch::async, [&sc, &out, s] {
        ivc::write_run_outputs(out / ("seed_" + std::to_string(s)), ivc::run(sc, s));
      }));
    }
    for (auto& f : batch) f.get();
  }
  std::cout << "wrote " << all.size() << " replications under " << out.string() << '\n';
  return 0;
}

int cmd_validate() {
  bool all_ok = true;
  std::string line;
  while (std::getline(std::cin, line)) {
    const auto v = ivc::validate_uri(line);
    all_ok = all_ok && v.ok;
    std::cout << v.text << '\n';
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ivcsim: inter-vehicle communication simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario and write CSV outputs");
  std::string cfg;
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::string out = "out";
  run->add_option("config", cfg, "Scenario YAML")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--seeds", seeds, "Run seeds A..B, one directory each")->excludes(seed_opt);
  run->add_option("--out", out, "Output directory");

  auto* t1 = app.add_subcommand("table1", "Contact time versus speed");
  double range = 100.0;
  std::vector<double> speeds{100, 80, 60, 40, 20};
  t1->add_option("--range", range, "Range in meters")->check(CLI::PositiveNumber);
  t1->add_option("--speeds", speeds, "Speeds in km/h")->delimiter(',')->check(CLI::PositiveNumber);

  auto* t2 = app.add_subcommand("table2", "Discovery time per device");
  std::size_t samples = 10000;
  std::uint64_t t2_seed = 1;
  double jitter = 0.5;
  t2->add_option("--samples", samples, "Draws per device")->check(CLI::PositiveNumber);
  t2->add_option("--seed", t2_seed, "RNG seed");
  t2->add_option("--jitter", jitter, "Half-width of the uniform spread (s)")->check(CLI::NonNegativeNumber);

  auto* val = app.add_subcommand("validate", "Check message URIs read from stdin");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(cfg, seed, seeds, out);
    if (t1->parsed()) {
      ivc::write_in_range_csv(std::cout, ivc::in_range_table(range, speeds));
      return 0;
    }
    if (t2->parsed()) {
      ivc::write_discovery_csv(std::cout, ivc::discovery_table(ivc::default_discovery_devices(), jitter, samples, t2_seed));
      return 0;
    }
    if (val->parsed()) return cmd_validate();
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const ivc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
