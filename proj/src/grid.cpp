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

#include "concaflow/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "concaflow/common.hpp"

namespace concaflow {

GridFunction GridFunction::line(double x0, double dx, int n) {
  GridFunction g;
  g.dims = 1;
  g.origin = {x0, 0.0};
  g.spacing = {dx, 1.0};
  g.shape = {n, 1};
  g.values.assign(static_cast<std::size_t>(n), 0.0);
  return g;
}

GridFunction GridFunction::rect(double x0, double dx, int nx, double y0,
                                double dy, int ny) {
  GridFunction g;
  g.dims = 2;
  g.origin = {x0, y0};
  g.spacing = {dx, dy};
  g.shape = {nx, ny};
  g.values.assign(static_cast<std::size_t>(nx) * ny, 0.0);
  return g;
}

double GridFunction::max_value() const {
  double m = 0.0;
  for (double v : values)
    if (v > m) m = v;
  return m;
}

void GridFunction::validate() const {
  if (dims != 1 && dims != 2)
    throw ConfigError("grid: dims must be 1 or 2");
  if (dims == 1 && shape[1] != 1)
    throw ConfigError("grid: 1D grids need shape[1] == 1");
  for (int ax = 0; ax < dims; ++ax) {
    if (!(spacing[ax] > 0.0) || !std::isfinite(spacing[ax]))
      throw ConfigError("grid: spacing must be positive and finite");
    if (!std::isfinite(origin[ax])) throw ConfigError("grid: origin not finite");
    if (shape[ax] < 2) throw ConfigError("grid: need at least 2 nodes per axis");
  }
  if (size() != static_cast<std::int64_t>(shape[0]) * shape[1])
    throw ConfigError("grid: value count does not match shape");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ConfigError("grid: values must be finite and nonnegative");
}

void save_grid(const GridFunction& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("grid: cannot write '" + path + "'");
  char buf[64];
  out << "dims " << g.dims << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", g.origin[0]);
  out << "origin " << buf;
  if (g.dims == 2) {
    std::snprintf(buf, sizeof buf, " %.17g", g.origin[1]);
    out << buf;
  }
  out << "\nspacing ";
  std::snprintf(buf, sizeof buf, "%.17g", g.spacing[0]);
  out << buf;
  if (g.dims == 2) {
    std::snprintf(buf, sizeof buf, " %.17g", g.spacing[1]);
    out << buf;
  }
  out << "\nshape " << g.shape[0];
  if (g.dims == 2) out << " " << g.shape[1];
  out << "\n";
  for (int i = 0; i < g.shape[0]; ++i) {
    for (int j = 0; j < g.shape[1]; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", g.at(i, j));
      out << (j ? " " : "") << buf;
    }
    out << "\n";
  }
  if (!out) throw ConfigError("grid: write failed for '" + path + "'");
}

GridFunction load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("grid: cannot open '" + path + "'");
  auto header_line = [&](const char* key) {
    std::string line;
    if (!std::getline(in, line))
      throw ConfigError("grid: truncated header in '" + path + "'");
    std::istringstream ls(line);
    std::string k;
    ls >> k;
    if (k != key)
      throw ConfigError("grid: expected header '" + std::string(key) +
                        "', got '" + k + "' in '" + path + "'");
    return ls;
  };
  GridFunction g;
  {
    auto ls = header_line("dims");
    if (!(ls >> g.dims)) throw ConfigError("grid: bad dims line");
  }
  if (g.dims != 1 && g.dims != 2)
    throw ConfigError("grid: dims must be 1 or 2 in '" + path + "'");
  {
    auto ls = header_line("origin");
    if (!(ls >> g.origin[0])) throw ConfigError("grid: bad origin line");
    if (g.dims == 2 && !(ls >> g.origin[1]))
      throw ConfigError("grid: origin needs 2 values for dims 2");
  }
  {
    auto ls = header_line("spacing");
    if (!(ls >> g.spacing[0])) throw ConfigError("grid: bad spacing line");
    if (g.dims == 2 && !(ls >> g.spacing[1]))
      throw ConfigError("grid: spacing needs 2 values for dims 2");
  }
  {
    auto ls = header_line("shape");
    if (!(ls >> g.shape[0])) throw ConfigError("grid: bad shape line");
    if (g.dims == 2) {
      if (!(ls >> g.shape[1]))
        throw ConfigError("grid: shape needs 2 values for dims 2");
    } else {
      g.shape[1] = 1;
    }
  }
  if (g.shape[0] < 1 || g.shape[1] < 1)
    throw ConfigError("grid: nonpositive shape in '" + path + "'");
  const std::int64_t total = static_cast<std::int64_t>(g.shape[0]) * g.shape[1];
  g.values.reserve(static_cast<std::size_t>(total));
  double v;
  while (static_cast<std::int64_t>(g.values.size()) < total && (in >> v))
    g.values.push_back(v);
  if (static_cast<std::int64_t>(g.values.size()) != total)
    throw ConfigError("grid: value matrix truncated in '" + path + "'");
  g.validate();
  return g;
}

}  // namespace concaflow
