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

#ifndef CONCAFLOW_GRID_HPP
#define CONCAFLOW_GRID_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace concaflow {

// Nonnegative samples on a uniform 1D interval or 2D rectangle.  Storage is
// row-major over (i, j) with axis 0 the slow index; 1D grids use shape[1]=1.
struct GridFunction {
  int dims = 1;
  std::array<double, 2> origin{0.0, 0.0};
  std::array<double, 2> spacing{1.0, 1.0};
  std::array<int, 2> shape{0, 1};
  std::vector<double> values;
  // When true the function is extended by zero beyond the grid (whole-space
  // semantics); when false it is only defined on the rectangle.
  bool zero_outside = false;

  static GridFunction line(double x0, double dx, int n);
  static GridFunction rect(double x0, double dx, int nx, double y0, double dy,
                           int ny);

  std::int64_t size() const { return static_cast<std::int64_t>(values.size()); }
  double& at(int i, int j = 0) {
    return values[static_cast<std::size_t>(i) * shape[1] + j];
  }
  double at(int i, int j = 0) const {
    return values[static_cast<std::size_t>(i) * shape[1] + j];
  }
  double x(int i) const { return origin[0] + spacing[0] * i; }
  double y(int j) const { return origin[1] + spacing[1] * j; }
  double max_value() const;

  // Verifies the type invariants (positive spacing, matching sizes, finite
  // nonnegative values); throws ConfigError.
  void validate() const;
};

// Plain-text format with a 4-line header (dims, origin, spacing, shape)
// followed by the value matrix, one grid row per line (1D: one value per
// line).  Round-trips exactly via %.17g.
void save_grid(const GridFunction& g, const std::string& path);
GridFunction load_grid(const std::string& path);

}  // namespace concaflow

#endif  // CONCAFLOW_GRID_HPP
