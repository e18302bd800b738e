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

#include "concaflow/concavity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "concaflow/flow.hpp"
#include "concaflow/hierarchy.hpp"
#include "concaflow/kernels.hpp"

namespace concaflow {

namespace {

// A maximal straight run of nodes: start index, unit step in index space,
// length.  Pair sweeps walk these runs so every tested midpoint is a node.
struct LineRef {
  int i0, j0, di, dj, len;
};

std::vector<LineRef> grid_lines(const GridFunction& u) {
  std::vector<LineRef> lines;
  const int nx = u.shape[0];
  if (u.dims == 1) {
    if (nx >= 3) lines.push_back({0, 0, 1, 0, nx});
    return lines;
  }
  const int ny = u.shape[1];
  for (int j = 0; j < ny; ++j)
    if (nx >= 3) lines.push_back({0, j, 1, 0, nx});
  for (int i = 0; i < nx; ++i)
    if (ny >= 3) lines.push_back({i, 0, 0, 1, ny});
  for (int i = 0; i < nx; ++i) {
    const int len = std::min(nx - i, ny);
    if (len >= 3) lines.push_back({i, 0, 1, 1, len});
  }
  for (int j = 1; j < ny; ++j) {
    const int len = std::min(nx, ny - j);
    if (len >= 3) lines.push_back({0, j, 1, 1, len});
  }
  for (int i = 0; i < nx; ++i) {
    const int len = std::min(nx - i, ny);
    if (len >= 3) lines.push_back({i, ny - 1, 1, -1, len});
  }
  for (int j = ny - 2; j >= 0; --j) {
    const int len = std::min(nx, j + 1);
    if (len >= 3) lines.push_back({0, j, 1, -1, len});
  }
  return lines;
}

struct ScanOutcome {
  double worst = -kInf;
  ConcavityWitness witness{};
  bool any = false;
  std::int64_t n_checks = 0;

  void offer(double v, const ConcavityWitness& w) {
    if (!any || v > worst) {
      worst = v;
      witness = w;
      any = true;
    }
  }
};

ConcavityWitness node_witness(const GridFunction& u, int xi, int xj, int yi,
                              int yj, double lambda) {
  ConcavityWitness w;
  w.x_node = {xi, xj};
  w.y_node = {yi, yj};
  w.x = {u.x(xi), u.dims == 2 ? u.y(xj) : 0.0};
  w.y = {u.x(yi), u.dims == 2 ? u.y(yj) : 0.0};
  w.lambda = lambda;
  return w;
}

using SweepFn = kernels::SweepResult (*)(const double*, std::int64_t,
                                         std::int64_t);

// Runs every even-gap midpoint sweep over every axis- and diagonal-aligned
// run of the grid.  The first strict maximum wins, so the recorded witness
// does not depend on thread count or instruction set.
ScanOutcome scan_pairs(const GridFunction& u, const std::vector<double>& vals,
                       SweepFn sweep) {
  ScanOutcome out;
  const int stride = u.shape[1];
  std::vector<double> buf;
  for (const LineRef& L : grid_lines(u)) {
    const double* ptr = nullptr;
    const bool contiguous =
        (u.dims == 1) || (L.di == 0 && L.dj == 1);
    if (contiguous) {
      ptr = vals.data() + static_cast<std::size_t>(L.i0) * stride + L.j0;
    } else {
      buf.resize(L.len);
      for (int s = 0; s < L.len; ++s)
        buf[s] = vals[static_cast<std::size_t>(L.i0 + s * L.di) * stride +
                      (L.j0 + s * L.dj)];
      ptr = buf.data();
    }
    for (std::int64_t gap = 1; 2 * gap < L.len; ++gap) {
      const kernels::SweepResult r = sweep(ptr, L.len, gap);
      out.n_checks += L.len - 2 * gap;
      if (r.index >= 0 && (!out.any || r.violation > out.worst)) {
        const int s = static_cast<int>(r.index);
        const int g = static_cast<int>(gap);
        out.offer(r.violation,
                  node_witness(u, L.i0 + s * L.di, L.j0 + s * L.dj,
                               L.i0 + (s + 2 * g) * L.di,
                               L.j0 + (s + 2 * g) * L.dj, 0.5));
      }
    }
  }
  return out;
}

// A seeded batch of (x, y, lambda) tests with lambda in {1/4, 1/3, 3/4};
// partner indices are drawn congruent to the anchor modulo the weight's
// denominator so the combination point lands exactly on a node.
void scan_random_triples(const GridFunction& u, const std::vector<double>& vals,
                         bool quasi, ScanOutcome& out) {
  constexpr int kTriples = 2000;
  struct Weight {
    double lambda;
    int num, den;
  };
  constexpr Weight kWeights[] = {{0.25, 1, 4}, {1.0 / 3.0, 1, 3}, {0.75, 3, 4}};
  const int nx = u.shape[0];
  const int ny = u.dims == 2 ? u.shape[1] : 1;
  const int stride = u.shape[1];
  Rng rng(0x51ab5eedULL + 1000003ULL * static_cast<std::uint64_t>(nx) +
          static_cast<std::uint64_t>(ny));
  auto partner = [&rng](int anchor, int n, int den) {
    const int r = anchor % den;
    const int count = (n - 1 - r) / den + 1;
    return r + den * static_cast<int>(rng.integer(0, count - 1));
  };
  for (int trial = 0; trial < kTriples; ++trial) {
    const Weight w = kWeights[rng.integer(0, 2)];
    const int xi = static_cast<int>(rng.integer(0, nx - 1));
    const int xj =
        u.dims == 2 ? static_cast<int>(rng.integer(0, ny - 1)) : 0;
    const int yi = partner(xi, nx, w.den);
    const int yj = u.dims == 2 ? partner(xj, ny, w.den) : 0;
    const int mi = xi + ((yi - xi) / w.den) * w.num;
    const int mj = xj + ((yj - xj) / w.den) * w.num;
    const double vx = vals[static_cast<std::size_t>(xi) * stride + xj];
    const double vy = vals[static_cast<std::size_t>(yi) * stride + yj];
    const double vm = vals[static_cast<std::size_t>(mi) * stride + mj];
    ++out.n_checks;
    double cand;
    if (quasi) {
      cand = std::min(vx, vy) - vm;
    } else if (vx == -kInf || vy == -kInf) {
      continue;  // a zero endpoint makes the right side -inf: always holds
    } else {
      cand = (vm == -kInf) ? kInf
                           : (1.0 - w.lambda) * vx + w.lambda * vy - vm;
    }
    if (!out.any || cand > out.worst)
      out.offer(cand, node_witness(u, xi, xj, yi, yj, w.lambda));
  }
}

ConcavityReport finish_report(ConcavityKind kind, std::string family,
                              double tol, const ScanOutcome& out) {
  ConcavityReport r;
  r.kind = kind;
  r.family = std::move(family);
  r.tolerance = tol;
  r.n_checks = out.n_checks;
  r.worst_violation = out.any ? std::max(0.0, out.worst) : 0.0;
  r.passed = !(r.worst_violation > tol);
  if (!r.passed) {
    r.has_witness = true;
    r.witness = out.witness;
  }
  return r;
}

void require_below_a(const GridFunction& u, const AdmissibleFunction& F) {
  if (std::isfinite(F.a()) && u.max_value() > F.a() - kEndpointMargin)
    throw DomainError(
        "concavity scan: grid values reach the top of the admissible "
        "interval [0, " +
        std::to_string(F.a()) + ")");
}

std::vector<double> transformed_values(const GridFunction& u,
                                       const AdmissibleFunction& F) {
  std::vector<double> y(u.values.size());
  for (std::size_t k = 0; k < y.size(); ++k)
    y[k] = u.values[k] == 0.0 ? -kInf : F.F(u.values[k]);
  return y;
}

ConcavityReport concave_scan(const GridFunction& u,
                             const std::vector<double>& y, ConcavityKind kind,
                             std::string family, double tol) {
  ScanOutcome out = scan_pairs(u, y, &kernels::concave_pair_sweep);
  scan_random_triples(u, y, /*quasi=*/false, out);
  return finish_report(kind, std::move(family), tol, out);
}

// ------------------------------------------------------------------
// Upper concave chains (1D hulls), shared by the 1D envelope, the 2D
// pruning pass, and the degenerate 2D fallbacks.

struct Chain {
  std::vector<double> x, y;  // hull vertices, x strictly increasing
};

// Least concave majorant of finite points sorted by strictly increasing x.
Chain upper_chain(const std::vector<double>& xs, const std::vector<double>& ys) {
  Chain c;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    while (c.x.size() >= 2) {
      const std::size_t m = c.x.size();
      // Drop the middle vertex when it sits on or below the chord from its
      // left neighbour to the incoming point.
      const double keep = (c.y[m - 1] - c.y[m - 2]) * (xs[k] - c.x[m - 2]) -
                          (ys[k] - c.y[m - 2]) * (c.x[m - 1] - c.x[m - 2]);
      if (keep > 0.0) break;
      c.x.pop_back();
      c.y.pop_back();
    }
    c.x.push_back(xs[k]);
    c.y.push_back(ys[k]);
  }
  return c;
}

// Hull height at x; -inf outside the vertex span.
double chain_eval(const Chain& c, double x) {
  if (c.x.empty() || x < c.x.front() || x > c.x.back()) return -kInf;
  if (c.x.size() == 1) return c.y.front();
  const auto it = std::upper_bound(c.x.begin(), c.x.end(), x);
  std::size_t hi = static_cast<std::size_t>(it - c.x.begin());
  if (hi == 0) ++hi;
  if (hi == c.x.size()) --hi;
  const std::size_t lo = hi - 1;
  const double t = (x - c.x[lo]) / (c.x[hi] - c.x[lo]);
  return (1.0 - t) * c.y[lo] + t * c.y[hi];
}

GridFunction envelope_1d(const GridFunction& u, const AdmissibleFunction& F,
                         double tol, const std::vector<double>& y) {
  GridFunction env = u;
  std::fill(env.values.begin(), env.values.end(), 0.0);
  std::vector<double> xs, ys;
  std::vector<int> support;
  for (int i = 0; i < u.shape[0]; ++i)
    if (y[i] != -kInf) {
      support.push_back(i);
      xs.push_back(u.x(i));
      ys.push_back(y[i]);
    }
  if (support.empty()) return env;
  const Chain chain = upper_chain(xs, ys);
  std::vector<bool> vertex(u.values.size(), false);
  {
    std::size_t v = 0;
    for (std::size_t k = 0; k < support.size(); ++k)
      if (v < chain.x.size() && xs[k] == chain.x[v]) {
        vertex[support[k]] = true;
        ++v;
      }
  }
  for (int i = support.front(); i <= support.back(); ++i) {
    if (vertex[i]) {
      env.values[i] = u.values[i];  // hull vertices keep their exact value
      continue;
    }
    const double h = chain_eval(chain, u.x(i));
    const double val = h == -kInf ? 0.0 : F.f(h);
    if (val < u.values[i] - tol)
      throw NumericError("envelope fell below its input; hull construction "
                         "is inconsistent");
    env.values[i] = std::max(val, u.values[i]);
  }
  return env;
}

// ------------------------------------------------------------------
// 2D envelope: upper convex hull of the lifted points (x, y, F(u)).

struct Pt3 {
  double x, y, h;
  int node;  // flat node index in the source grid
};

struct Facet {
  int a, b, c;
  double n0, n1, n2, off;
  bool alive;
};

Facet make_facet(const std::vector<Pt3>& p, int a, int b, int c,
                 const Pt3& interior) {
  Facet f{a, b, c, 0.0, 0.0, 0.0, 0.0, true};
  const double ux = p[b].x - p[a].x, uy = p[b].y - p[a].y,
               uh = p[b].h - p[a].h;
  const double vx = p[c].x - p[a].x, vy = p[c].y - p[a].y,
               vh = p[c].h - p[a].h;
  f.n0 = uy * vh - uh * vy;
  f.n1 = uh * vx - ux * vh;
  f.n2 = ux * vy - uy * vx;
  f.off = f.n0 * p[a].x + f.n1 * p[a].y + f.n2 * p[a].h;
  // Outward means the interior reference point lies strictly beneath.
  if (f.n0 * interior.x + f.n1 * interior.y + f.n2 * interior.h > f.off) {
    std::swap(f.b, f.c);
    f.n0 = -f.n0;
    f.n1 = -f.n1;
    f.n2 = -f.n2;
    f.off = -f.off;
  }
  return f;
}

// Heights of the upper hull of `pts` (normalized coordinates) evaluated at
// the grid nodes; -inf where the node projects outside the hull.  `qx` and
// `qy` are the normalized node coordinates per axis.
std::vector<double> upper_hull_heights(const std::vector<Pt3>& pts,
                                       const std::vector<double>& qx,
                                       const std::vector<double>& qy) {
  constexpr double kEpsVisible = 1e-10;
  const int m = static_cast<int>(pts.size());
  std::vector<double> heights(qx.size() * qy.size(), -kInf);

  // Extreme-point seed: a point, the farthest point from it, the point of
  // largest triangle area, the point of largest plane distance.
  int e0 = 0;
  for (int k = 1; k < m; ++k)
    if (pts[k].x < pts[e0].x ||
        (pts[k].x == pts[e0].x && pts[k].y < pts[e0].y))
      e0 = k;
  int e1 = -1;
  double best = -1.0;
  for (int k = 0; k < m; ++k) {
    const double dx = pts[k].x - pts[e0].x, dy = pts[k].y - pts[e0].y,
                 dh = pts[k].h - pts[e0].h;
    const double d = dx * dx + dy * dy + dh * dh;
    if (d > best) {
      best = d;
      e1 = k;
    }
  }
  int e2 = -1;
  best = -1.0;
  for (int k = 0; k < m; ++k) {
    const double ax = pts[e1].x - pts[e0].x, ay = pts[e1].y - pts[e0].y,
                 ah = pts[e1].h - pts[e0].h;
    const double bx = pts[k].x - pts[e0].x, by = pts[k].y - pts[e0].y,
                 bh = pts[k].h - pts[e0].h;
    const double cx = ay * bh - ah * by, cy = ah * bx - ax * bh,
                 ch = ax * by - ay * bx;
    const double d = cx * cx + cy * cy + ch * ch;
    if (d > best) {
      best = d;
      e2 = k;
    }
  }
  Facet seed = make_facet(pts, e0, e1, e2, pts[e0]);
  const double nn = std::sqrt(seed.n0 * seed.n0 + seed.n1 * seed.n1 +
                              seed.n2 * seed.n2);
  int e3 = -1;
  best = 0.0;
  for (int k = 0; k < m; ++k) {
    const double d = std::fabs(seed.n0 * pts[k].x + seed.n1 * pts[k].y +
                               seed.n2 * pts[k].h - seed.off);
    if (d > best) {
      best = d;
      e3 = k;
    }
  }

  std::vector<Facet> facets;
  if (nn == 0.0 || e3 < 0 || best / nn < 1e-12) {
    // Coplanar cloud: the hull function is the seed plane over the 2D
    // convex hull of the projections (callers screened the collinear case).
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return pts[a].x < pts[b].x ||
             (pts[a].x == pts[b].x && pts[a].y < pts[b].y);
    });
    auto cross = [&](int o, int a, int b) {
      return (pts[a].x - pts[o].x) * (pts[b].y - pts[o].y) -
             (pts[a].y - pts[o].y) * (pts[b].x - pts[o].x);
    };
    std::vector<int> hull;
    for (int pass = 0; pass < 2; ++pass) {
      const std::size_t base = hull.size();
      for (int idx : order) {
        while (hull.size() >= base + 2 &&
               cross(hull[hull.size() - 2], hull.back(), idx) <= 0.0)
          hull.pop_back();
        hull.push_back(idx);
      }
      hull.pop_back();
      std::reverse(order.begin(), order.end());
    }
    const Facet& pl = seed;
    for (std::size_t i = 0; i < qx.size(); ++i)
      for (std::size_t j = 0; j < qy.size(); ++j) {
        bool inside = true;
        for (std::size_t k = 0; k < hull.size() && inside; ++k) {
          const int a = hull[k], b = hull[(k + 1) % hull.size()];
          const double cr = (pts[b].x - pts[a].x) * (qy[j] - pts[a].y) -
                            (pts[b].y - pts[a].y) * (qx[i] - pts[a].x);
          inside = cr >= -1e-9;
        }
        if (inside && std::fabs(pl.n2) > 1e-12)
          heights[i * qy.size() + j] =
              (pl.off - pl.n0 * qx[i] - pl.n1 * qy[j]) / pl.n2;
      }
    return heights;
  }

  // Non-degenerate: incremental hull, deterministic shuffled insertions.
  const Pt3 interior{(pts[e0].x + pts[e1].x + pts[e2].x + pts[e3].x) / 4.0,
                     (pts[e0].y + pts[e1].y + pts[e2].y + pts[e3].y) / 4.0,
                     (pts[e0].h + pts[e1].h + pts[e2].h + pts[e3].h) / 4.0,
                     -1};
  facets.push_back(make_facet(pts, e0, e1, e2, interior));
  facets.push_back(make_facet(pts, e0, e1, e3, interior));
  facets.push_back(make_facet(pts, e0, e2, e3, interior));
  facets.push_back(make_facet(pts, e1, e2, e3, interior));

  std::vector<int> order;
  order.reserve(m);
  for (int k = 0; k < m; ++k)
    if (k != e0 && k != e1 && k != e2 && k != e3) order.push_back(k);
  Rng rng(0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(m));
  for (std::size_t k = order.size(); k > 1; --k)
    std::swap(order[k - 1], order[rng.integer(0, static_cast<std::int64_t>(k) - 1)]);

  std::vector<int> visible;
  for (int p : order) {
    visible.clear();
    for (std::size_t fi = 0; fi < facets.size(); ++fi) {
      const Facet& f = facets[fi];
      if (f.alive && f.n0 * pts[p].x + f.n1 * pts[p].y + f.n2 * pts[p].h -
                             f.off >
                         kEpsVisible)
        visible.push_back(static_cast<int>(fi));
    }
    if (visible.empty()) continue;
    std::map<std::pair<int, int>, std::pair<int, int>> edge_dir;
    std::map<std::pair<int, int>, int> edge_count;
    for (int fi : visible) {
      const Facet& f = facets[fi];
      const int vs[3][2] = {{f.a, f.b}, {f.b, f.c}, {f.c, f.a}};
      for (const auto& e : vs) {
        const auto key = std::minmax(e[0], e[1]);
        ++edge_count[key];
        edge_dir[key] = {e[0], e[1]};
      }
      facets[fi].alive = false;
    }
    for (const auto& [key, count] : edge_count) {
      if (count != 1) continue;
      const auto [eu, ev] = edge_dir[key];
      facets.push_back(make_facet(pts, eu, ev, p, interior));
    }
  }

  // Rasterize the upward facets; max-over-planes absorbs edge overlap.
  const double x0 = qx.front(), dx = qx.size() > 1 ? qx[1] - qx[0] : 1.0;
  const double y0 = qy.front(), dy = qy.size() > 1 ? qy[1] - qy[0] : 1.0;
  for (const Facet& f : facets) {
    if (!f.alive || f.n2 <= 1e-12) continue;
    const Pt3 &A = pts[f.a], &B = pts[f.b], &C = pts[f.c];
    const double lox = std::min({A.x, B.x, C.x}) - 1e-9;
    const double hix = std::max({A.x, B.x, C.x}) + 1e-9;
    const double loy = std::min({A.y, B.y, C.y}) - 1e-9;
    const double hiy = std::max({A.y, B.y, C.y}) + 1e-9;
    const int ilo = std::max(0, static_cast<int>(std::ceil((lox - x0) / dx)));
    const int ihi = std::min(static_cast<int>(qx.size()) - 1,
                             static_cast<int>(std::floor((hix - x0) / dx)));
    const int jlo = std::max(0, static_cast<int>(std::ceil((loy - y0) / dy)));
    const int jhi = std::min(static_cast<int>(qy.size()) - 1,
                             static_cast<int>(std::floor((hiy - y0) / dy)));
    const double det = f.n2;  // twice the signed projected area
    for (int i = ilo; i <= ihi; ++i)
      for (int j = jlo; j <= jhi; ++j) {
        const double px = qx[i] - A.x, py = qy[j] - A.y;
        const double lb = ((C.y - A.y) * px - (C.x - A.x) * py) / det;
        const double lc = ((A.y - B.y) * px + (B.x - A.x) * py) / det;
        if (lb < -1e-9 || lc < -1e-9 || lb + lc > 1.0 + 1e-9) continue;
        const double h = (f.off - f.n0 * qx[i] - f.n1 * qy[j]) / f.n2;
        double& slot = heights[static_cast<std::size_t>(i) * qy.size() + j];
        if (h > slot) slot = h;
      }
  }
  // Hull vertices keep their exact height.
  for (const Facet& f : facets) {
    if (!f.alive || f.n2 <= 1e-12) continue;
    for (int v : {f.a, f.b, f.c}) {
      const int i = static_cast<int>(std::lround((pts[v].x - x0) / dx));
      const int j = static_cast<int>(std::lround((pts[v].y - y0) / dy));
      if (i >= 0 && i < static_cast<int>(qx.size()) && j >= 0 &&
          j < static_cast<int>(qy.size()) &&
          std::fabs(qx[i] - pts[v].x) < 1e-9 &&
          std::fabs(qy[j] - pts[v].y) < 1e-9) {
        double& slot = heights[static_cast<std::size_t>(i) * qy.size() + j];
        if (pts[v].h > slot) slot = pts[v].h;
      }
    }
  }
  return heights;
}

GridFunction envelope_2d(const GridFunction& u, const AdmissibleFunction& F,
                         double tol, const std::vector<double>& y) {
  GridFunction env = u;
  std::fill(env.values.begin(), env.values.end(), 0.0);
  const int nx = u.shape[0], ny = u.shape[1];

  struct Raw {
    int i, j;
    double h;
  };
  std::vector<Raw> support;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const double v = y[static_cast<std::size_t>(i) * ny + j];
      if (v != -kInf) support.push_back({i, j, v});
    }
  if (support.empty()) return env;

  // Pruning: a point strictly below the upper chain of its row or of its
  // column lies below a vertical average of other points, so it cannot
  // support the hull.
  {
    std::vector<Raw> kept;
    std::vector<double> xs, ys_;
    auto below_chain = [&](double coord, double h, const Chain& c) {
      const double hv = chain_eval(c, coord);
      return hv - h > 1e-9 * (1.0 + std::fabs(h));
    };
    std::vector<Chain> row_chain(nx), col_chain(ny);
    for (int i = 0; i < nx; ++i) {
      xs.clear();
      ys_.clear();
      for (int j = 0; j < ny; ++j) {
        const double v = y[static_cast<std::size_t>(i) * ny + j];
        if (v != -kInf) {
          xs.push_back(u.y(j));
          ys_.push_back(v);
        }
      }
      row_chain[i] = upper_chain(xs, ys_);
    }
    for (int j = 0; j < ny; ++j) {
      xs.clear();
      ys_.clear();
      for (int i = 0; i < nx; ++i) {
        const double v = y[static_cast<std::size_t>(i) * ny + j];
        if (v != -kInf) {
          xs.push_back(u.x(i));
          ys_.push_back(v);
        }
      }
      col_chain[j] = upper_chain(xs, ys_);
    }
    for (const Raw& r : support)
      if (!below_chain(u.y(r.j), r.h, row_chain[r.i]) &&
          !below_chain(u.x(r.i), r.h, col_chain[r.j]))
        kept.push_back(r);
    support.swap(kept);
  }

  // Normalize to the unit cube so the orientation epsilons are scale-free.
  double xlo = kInf, xhi = -kInf, ylo = kInf, yhi = -kInf, hlo = kInf,
         hhi = -kInf;
  for (const Raw& r : support) {
    xlo = std::min(xlo, u.x(r.i));
    xhi = std::max(xhi, u.x(r.i));
    ylo = std::min(ylo, u.y(r.j));
    yhi = std::max(yhi, u.y(r.j));
    hlo = std::min(hlo, r.h);
    hhi = std::max(hhi, r.h);
  }
  const double xs_ = xhi > xlo ? xhi - xlo : 1.0;
  const double ys_ = yhi > ylo ? yhi - ylo : 1.0;
  const double hs_ = hhi > hlo ? hhi - hlo : 1.0;

  // Collinear projections reduce to a 1D chain along that line.
  {
    const Raw& p0 = support.front();
    double dirx = 0.0, diry = 0.0, dn = 0.0;
    for (const Raw& r : support) {
      const double dx = (u.x(r.i) - u.x(p0.i)) / xs_;
      const double dy = (u.y(r.j) - u.y(p0.j)) / ys_;
      if (dx * dx + dy * dy > dn) {
        dn = dx * dx + dy * dy;
        dirx = dx;
        diry = dy;
      }
    }
    bool collinear = true;
    if (dn > 0.0) {
      const double inv = 1.0 / std::sqrt(dn);
      dirx *= inv;
      diry *= inv;
      for (const Raw& r : support) {
        const double dx = (u.x(r.i) - u.x(p0.i)) / xs_;
        const double dy = (u.y(r.j) - u.y(p0.j)) / ys_;
        if (std::fabs(dx * diry - dy * dirx) > 1e-9) {
          collinear = false;
          break;
        }
      }
    }
    if (collinear) {
      std::vector<std::pair<double, double>> line;
      for (const Raw& r : support)
        line.push_back({(u.x(r.i) - u.x(p0.i)) / xs_ * dirx +
                            (u.y(r.j) - u.y(p0.j)) / ys_ * diry,
                        r.h});
      std::sort(line.begin(), line.end());
      std::vector<double> sx, sy;
      for (const auto& [s, h] : line) {
        if (!sx.empty() && s == sx.back()) {
          sy.back() = std::max(sy.back(), h);
          continue;
        }
        sx.push_back(s);
        sy.push_back(h);
      }
      const Chain chain = upper_chain(sx, sy);
      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
          const double dx = (u.x(i) - u.x(p0.i)) / xs_;
          const double dy = (u.y(j) - u.y(p0.j)) / ys_;
          const bool on_line =
              dn > 0.0 ? std::fabs(dx * diry - dy * dirx) <= 1e-9
                       : std::fabs(dx) <= 1e-9 && std::fabs(dy) <= 1e-9;
          if (!on_line) continue;
          const double h = chain_eval(chain, dx * dirx + dy * diry);
          if (h != -kInf) env.at(i, j) = F.f(h);
        }
      for (std::size_t k = 0; k < env.values.size(); ++k) {
        if (env.values[k] < u.values[k] - tol)
          throw NumericError("envelope fell below its input; hull "
                             "construction is inconsistent");
        env.values[k] = std::max(env.values[k], u.values[k]);
      }
      return env;
    }
  }

  std::vector<Pt3> pts;
  pts.reserve(support.size());
  for (const Raw& r : support)
    pts.push_back({(u.x(r.i) - xlo) / xs_, (u.y(r.j) - ylo) / ys_,
                   (r.h - hlo) / hs_, r.i * ny + r.j});
  std::vector<double> qx(nx), qy(ny);
  for (int i = 0; i < nx; ++i) qx[i] = (u.x(i) - xlo) / xs_;
  for (int j = 0; j < ny; ++j) qy[j] = (u.y(j) - ylo) / ys_;

  const std::vector<double> heights = upper_hull_heights(pts, qx, qy);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const double hn = heights[static_cast<std::size_t>(i) * ny + j];
      if (hn == -kInf) continue;
      env.at(i, j) = F.f(hlo + hn * hs_);
    }
  for (std::size_t k = 0; k < env.values.size(); ++k) {
    if (env.values[k] < u.values[k] - tol)
      throw NumericError(
          "envelope fell below its input; hull construction is inconsistent");
    env.values[k] = std::max(env.values[k], u.values[k]);
  }
  return env;
}

}  // namespace

ConcavityReport check_F_concavity(const GridFunction& u,
                                  const AdmissibleFunction& F, double tol) {
  u.validate();
  require_below_a(u, F);
  return concave_scan(u, transformed_values(u, F), ConcavityKind::FConcave,
                      F.spec_string(), tol);
}

ConcavityReport check_log_concavity(const GridFunction& u, double tol) {
  u.validate();
  std::vector<double> y(u.values.size());
  for (std::size_t k = 0; k < y.size(); ++k)
    y[k] = u.values[k] == 0.0 ? -kInf : std::log(u.values[k]);
  return concave_scan(u, y, ConcavityKind::LogConcave, "log", tol);
}

ConcavityReport check_quasi_concavity(const GridFunction& u, double tol) {
  u.validate();
  ScanOutcome out = scan_pairs(u, u.values, &kernels::quasi_pair_sweep);
  scan_random_triples(u, u.values, /*quasi=*/true, out);
  return finish_report(ConcavityKind::QuasiConcave, "", tol, out);
}

GridFunction f_concave_envelope(const GridFunction& u,
                                const AdmissibleFunction& F, double tol) {
  u.validate();
  require_below_a(u, F);
  const std::vector<double> y = transformed_values(u, F);
  return u.dims == 1 ? envelope_1d(u, F, tol, y) : envelope_2d(u, F, tol, y);
}

double disruption_budget(double dx_w, double dx_z) {
  // Calibrated once against the exact separated-variables heat solution
  // (see the flow tests) and kept with 2x headroom.
  constexpr double kC = 0.06;
  return kC * (dx_w * dx_w + dx_z * dx_z);
}

DisruptionDatum build_disruption_datum(const AdmissibleFunction& F,
                                       SamplingSpec search_window,
                                       SamplingSpec z_spec) {
  if (!F.limit_at_zero_is_minus_infinity())
    throw ConfigError("disruption datum: the construction needs a transform "
                      "with F(0+) = -inf; " +
                      F.spec_string() + " has a finite limit");
  if (is_weaker(AdmissibleFunction::power(0.0), F).holds)
    throw ConfigError("disruption datum: " + F.spec_string() +
                      " is at least as strong as log-concavity, so its "
                      "profiles are log-concave and no violation exists");

  const SamplingSpec win =
      search_window.empty() ? F.default_J_window(400) : search_window;
  if (win.n < 3 || !(win.hi > win.lo))
    throw ConfigError("disruption datum: search window needs hi > lo and at "
                      "least 3 samples");
  const double delta = (win.hi - win.lo) / (win.n - 1);
  const double clo = win.lo + delta, chi = win.hi - delta;
  auto second_diff = [&](double zc) {
    return F.log_f(zc - delta) + F.log_f(zc + delta) - 2.0 * F.log_f(zc);
  };
  int best_k = -1;
  double best_v = -kInf;
  for (int k = 1; k + 1 < win.n; ++k) {
    const double v = second_diff(win.point(k));
    if (v > best_v) {
      best_v = v;
      best_k = k;
    }
  }
  if (best_k < 0)
    throw ConfigError("disruption datum: search window too narrow");
  double center = win.point(best_k);
  // Golden-section refinement of the scan maximum within its bracket.
  {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = std::max(clo, center - delta);
    double b = std::min(chi, center + delta);
    double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
    double f1 = second_diff(x1), f2 = second_diff(x2);
    for (int it = 0; it < 100; ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kInvPhi * (b - a);
        f2 = second_diff(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kInvPhi * (b - a);
        f1 = second_diff(x1);
      }
    }
    const double zc = f1 > f2 ? x1 : x2;
    const double v = std::max(f1, f2);
    if (v > best_v) {
      best_v = v;
      center = zc;
    }
  }
  if (!(best_v > 1e-12))
    throw DomainError(
        "disruption datum: no log-concavity violation found in the search "
        "window; widen it, or the transform may be at least as strong as "
        "log-concavity there");

  DisruptionDatum d;
  d.zeta = center - delta;
  d.omega = center + delta;
  d.lambda = 0.5;
  d.violation = 0.5 * best_v;
  d.c = std::isfinite(F.J_hi()) ? d.omega + 0.25 * (F.J_hi() - d.omega)
                                : d.omega + 1.0;

  const SamplingSpec zs = z_spec.empty() ? SamplingSpec{-8.0, 8.0, 801} : z_spec;
  if (zs.n < 3 || !(zs.hi > zs.lo))
    throw ConfigError("disruption datum: z grid needs hi > lo and at least 3 "
                      "samples");
  const double reach = std::max(std::fabs(zs.lo), std::fabs(zs.hi));
  if (std::isfinite(F.J_lo()) && d.c - reach <= F.J_lo())
    throw ConfigError("disruption datum: the z grid reaches below the "
                      "transform's J interval");
  const double dz = (zs.hi - zs.lo) / (zs.n - 1);
  d.phi2 = GridFunction::line(zs.lo, dz, zs.n);
  for (int k = 0; k < zs.n; ++k)
    d.phi2.values[k] = std::exp(F.log_f(d.c - std::fabs(d.phi2.x(k))));

  if (!check_F_concavity(d.phi2, F, 1e-8).passed)
    throw NumericError("disruption datum: the mirrored profile failed its "
                       "own F-concavity scan");
  int k0 = 0;
  while (k0 < zs.n && d.phi2.x(k0) <= 1e-12) ++k0;
  GridFunction left = GridFunction::line(zs.lo, dz, k0);
  std::copy(d.phi2.values.begin(), d.phi2.values.begin() + k0,
            left.values.begin());
  if (check_log_concavity(left, 1e-8).passed)
    throw DomainError("disruption datum: the sampled profile does not show "
                      "the violation on the left half-line; refine the z "
                      "grid or widen the search window");
  return d;
}

DisruptionRun run_disruption(const AdmissibleFunction& F,
                             const SamplingSpec& w_spec,
                             const SamplingSpec& z_spec,
                             const std::vector<double>& t_list, bool control,
                             SamplingSpec search_window) {
  if (t_list.empty())
    throw ConfigError("disruption run: t_list must not be empty");
  for (std::size_t k = 0; k < t_list.size(); ++k)
    if (!std::isfinite(t_list[k]) || t_list[k] <= 0.0 ||
        (k > 0 && t_list[k] <= t_list[k - 1]))
      throw ConfigError(
          "disruption run: t_list must be positive and strictly increasing");
  if (w_spec.n < 3 || !(w_spec.hi > w_spec.lo))
    throw ConfigError("disruption run: w grid needs hi > lo and at least 3 "
                      "samples");
  const double dxw = (w_spec.hi - w_spec.lo) / (w_spec.n - 1);
  const long k0 = std::lround(-w_spec.lo / dxw);
  if (k0 < 0 || k0 >= w_spec.n ||
      std::fabs(w_spec.lo + k0 * dxw) >
          1e-12 * std::max(1.0, w_spec.hi - w_spec.lo))
    throw ConfigError(
        "disruption run: the step axis must contain w = 0 as a node");

  DisruptionRun run;
  run.datum = build_disruption_datum(F, search_window, z_spec);
  GridFunction profile = run.datum.phi2;
  if (control) {
    // Same peak, log-concave shape: the pipeline noise floor.
    const double peak = std::exp(F.log_f(run.datum.c));
    for (int k = 0; k < profile.shape[0]; ++k) {
      const double z = profile.x(k);
      profile.values[k] = peak * std::exp(-0.5 * z * z);
    }
  }
  const GridFunction step = step_line(w_spec.lo, dxw, w_spec.n);
  const double dxz = profile.spacing[0];
  run.budget = disruption_budget(dxw, dxz);
  for (double t : t_list) {
    const FlowSnapshot snap = product_flow_2d(step, profile, t);
    run.reports.emplace_back(t,
                             check_quasi_concavity(snap.u, 10.0 * run.budget));
  }
  return run;
}

}  // namespace concaflow
