/* Copyright 2026 The concaflow Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "concaflow/common.hpp"
#include "concaflow/grid.hpp"

using namespace concaflow;

TEST_CASE("construction and accessors") {
  auto g = GridFunction::line(-1.0, 0.25, 9);
  CHECK(g.dims == 1);
  CHECK(g.size() == 9);
  CHECK(g.x(0) == -1.0);
  CHECK(g.x(8) == doctest::Approx(1.0));
  g.at(3) = 2.5;
  CHECK(g.at(3) == 2.5);
  CHECK(g.max_value() == 2.5);
  g.validate();

  auto r = GridFunction::rect(0.0, 0.5, 5, -2.0, 1.0, 3);
  CHECK(r.dims == 2);
  CHECK(r.size() == 15);
  r.at(4, 2) = 1.0;
  CHECK(r.values[4 * 3 + 2] == 1.0);
  CHECK(r.y(2) == 0.0);
  r.validate();
}

TEST_CASE("validation rejects bad grids") {
  auto g = GridFunction::line(0.0, 0.1, 8);
  g.values[2] = -0.5;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g.values[2] = kInf;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g.values[2] = 0.0;
  g.spacing[0] = 0.0;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g.spacing[0] = 0.1;
  g.values.pop_back();
  CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("text round trip preserves every bit (1D and 2D)") {
  auto g = GridFunction::line(-0.125, 1.0 / 3.0, 17);
  for (int i = 0; i < 17; ++i) g.at(i) = 1.0 / (1.0 + i * i);
  g.zero_outside = false;
  save_grid(g, "grid_rt1.txt");
  const auto h = load_grid("grid_rt1.txt");
  CHECK(h.dims == 1);
  CHECK(h.shape[0] == 17);
  CHECK(h.origin[0] == g.origin[0]);
  CHECK(h.spacing[0] == g.spacing[0]);
  for (int i = 0; i < 17; ++i) CHECK(h.at(i) == g.at(i));
  std::remove("grid_rt1.txt");

  auto r = GridFunction::rect(0.0, 0.1, 6, -1.0, 0.2, 4);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 4; ++j) r.at(i, j) = std::abs(i - j) * 0.37;
  save_grid(r, "grid_rt2.txt");
  const auto s = load_grid("grid_rt2.txt");
  CHECK(s.dims == 2);
  CHECK(s.shape[0] == 6);
  CHECK(s.shape[1] == 4);
  CHECK(s.origin[1] == r.origin[1]);
  CHECK(s.spacing[1] == r.spacing[1]);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 4; ++j) CHECK(s.at(i, j) == r.at(i, j));
  std::remove("grid_rt2.txt");
}

TEST_CASE("loader rejects malformed files") {
  {
    std::ofstream f("grid_bad1.txt");
    f << "dims 1\norigin 0\nshape 4\n1\n2\n3\n4\n";  // missing spacing line
  }
  CHECK_THROWS_AS(load_grid("grid_bad1.txt"), ConfigError);
  std::remove("grid_bad1.txt");
  {
    std::ofstream f("grid_bad2.txt");
    f << "dims 1\norigin 0\nspacing 0.5\nshape 4\n1\n2\n3\n";  // short matrix
  }
  CHECK_THROWS_AS(load_grid("grid_bad2.txt"), ConfigError);
  std::remove("grid_bad2.txt");
  {
    std::ofstream f("grid_bad3.txt");
    f << "dims 3\norigin 0\nspacing 0.5\nshape 4\n";
  }
  CHECK_THROWS_AS(load_grid("grid_bad3.txt"), ConfigError);
  std::remove("grid_bad3.txt");
  CHECK_THROWS_AS(load_grid("no_such_grid.txt"), ConfigError);
}
