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

#include <doctest.h>

#include <sstream>

#include "ivc/analytics.hpp"
#include "ivc/error.hpp"
#include "support.hpp"

using namespace ivc;

TEST_SUITE("analytics") {

TEST_CASE("in-range csv") {
  std::ostringstream out;
  write_in_range_csv(out, in_range_table(100.0, {100, 80, 60, 40, 20}));
  const auto rows = testing::read_csv(out.str());
  REQUIRE(rows.size() == 6);
  CHECK(rows[0][0] == "speed_kmh");
  CHECK(rows[1] == std::vector<std::string>{"100", "27.8", "7.194", "7", "7", "yes"});
  CHECK(rows[2][5] == "no");
  CHECK(rows[3][3] == "12");
  CHECK(rows[3][4] == "13");
  CHECK(rows[5][2] == "35.714");

  std::ostringstream wide;
  write_in_range_csv(wide, in_range_table(225.0, {100}));
  CHECK(wide.str().ends_with(",,\n"));
}

TEST_CASE("discovery table") {
  const auto rows = discovery_table(default_discovery_devices(), 0.5, 10000, 1);
  REQUIRE(rows.size() == 4);
  const double means[] = {2.25, 2.11, 2.33, 2.60};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(rows[i].configured_mean == means[i]);
    CHECK(std::abs(rows[i].empirical_mean - means[i]) / means[i] < 0.01);
    CHECK(rows[i].samples == 10000);
  }
  const auto exact = discovery_table(default_discovery_devices(), 0.0, 1, 9);
  for (std::size_t i = 0; i < 4; ++i) CHECK(exact[i].empirical_mean == means[i]);

  std::ostringstream out;
  write_discovery_csv(out, exact);
  CHECK(out.str().rfind("device,configured_mean,empirical_mean,n_samples\ndevice1,2.25,2.2500,1\n", 0) == 0);
  CHECK_THROWS_AS(discovery_table(default_discovery_devices(), 0.5, 0, 1), DomainError);
  CHECK_THROWS_AS(discovery_table({{"bad", 0.2}}, 0.5, 10, 1), ValidationError);
}

TEST_CASE("validate lines") {
  const auto ok = validate_uri("alert/11-newton-7/john3/6-king-1/john/092310/10000/NULL/accident\r\n");
  CHECK(ok.ok);
  CHECK(ok.text == "OK alert/11-newton-7/john3/6-king-1/john/092310/10000/NULL/accident");
  const auto bad = validate_uri("query/5-william-2/nevirvj1/2-hilton-9/nevirvj101523/5000/NULL/NULL");
  CHECK_FALSE(bad.ok);
  CHECK(bad.text.rfind("ERR field-count:", 0) == 0);
}

}
