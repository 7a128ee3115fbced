#pragma once

// Region classification of the (k1, k2) quadrant, the Morse function g_k on the
// flat torus, and the topology of S_k obtained by doubling the closure of U_k
// along its boundary.
//
// Torus coordinates: theta1 in [-pi/2, 3pi/2), theta2 in [0, 2pi).

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "suslov/core.hpp"

namespace suslov {

/// Region of k for the system b.  Boundary tests are relative to tau and are
/// applied in the order k1 k2 = 0, k1 = b1, k2 = b2, k1/b1 + k2/b2 = 1.
inline Region classify_region(const Params& b, const LevelValues& k, double tau = kTau) {
  const double x = k.k1 / b.b1;
  const double y = k.k2 / b.b2;
  Region r;
  if (x <= tau || y <= tau) {
    r.singular_cause = SingularCause::KZero;
  } else if (std::abs(x - 1.0) <= tau) {
    r.singular_cause = SingularCause::K1EqB1;
  } else if (std::abs(y - 1.0) <= tau) {
    r.singular_cause = SingularCause::K2EqB2;
  } else if (std::abs(x + y - 1.0) <= tau * std::max(1.0, x + y)) {
    r.singular_cause = SingularCause::RatioSumOne;
  }
  if (r.singular_cause) {
    r.tag = RegionTag::Singular;
    return r;
  }

  if (x + y < 1.0) {
    r.tag = RegionTag::D1;
  } else if (x < 1.0 && y < 1.0) {
    r.tag = RegionTag::D2;
  } else if (x > 1.0 && y < 1.0) {
    r.tag = RegionTag::D3;
  } else if (x < 1.0 && y > 1.0) {
    r.tag = RegionTag::D4;
  } else {
    r.tag = RegionTag::D5;
  }

  // The band region adjacent to the larger b is cut by the discriminant curve.
  const bool cut = (b.b1 > b.b2 && r.tag == RegionTag::D4) || (b.b1 < b.b2 && r.tag == RegionTag::D3);
  if (cut && !equal_b(b, tau)) {
    const double delta = discriminant_value(b, k);
    const double line = 2.0 * std::max(b.b1, b.b2);
    const bool below = k.k1 + k.k2 < line;
    if (std::abs(delta) <= tau * discriminant_scale(b, k)) {
      r.subregion = below ? Subregion::C1 : Subregion::C2;
    } else if (delta < 0.0) {
      r.subregion = Subregion::Sub4;
    } else {
      r.subregion = below ? Subregion::Sub12 : Subregion::Sub3;
    }
  }
  return r;
}

/// Critical levels of g_k.
struct GkData {
  double eps = 0.0;  // k1/b1 + k2/b2 - 1
  std::array<double, 2> saddle_levels{};
  double max_level = 0.0;
};

inline GkData gk_data(const Params& b, const LevelValues& k) {
  GkData d;
  d.saddle_levels = {k.k1 / b.b1, k.k2 / b.b2};
  d.max_level = d.saddle_levels[0] + d.saddle_levels[1];
  d.eps = d.max_level - 1.0;
  return d;
}

/// g_k(theta1, theta2) = (k1/b1) cos^2 theta1 + (k2/b2) sin^2 theta2.
inline double g_value(double theta1, double theta2, const Params& b, const LevelValues& k) {
  const double c = std::cos(theta1);
  const double s = std::sin(theta2);
  return k.k1 / b.b1 * c * c + k.k2 / b.b2 * s * s;
}

enum class MorseKind { Minimum, Saddle, Maximum };

struct GkCriticalPoint {
  double theta1 = 0.0;
  double theta2 = 0.0;
  MorseKind kind = MorseKind::Minimum;
  std::function<double(const Params&, const LevelValues&)> level;
};

/// The sixteen k-independent critical points of g_k, grouped by level.  The
/// saddles on theta1 = +-pi/2 sit at level k2/b2 and those on theta2 in {0, pi}
/// at k1/b1, as the formula for g_k dictates.
inline std::vector<GkCriticalPoint> gk_critical_points() {
  using L = std::function<double(const Params&, const LevelValues&)>;
  const L zero = [](const Params&, const LevelValues&) { return 0.0; };
  const L first = [](const Params& b, const LevelValues& k) { return k.k1 / b.b1; };
  const L second = [](const Params& b, const LevelValues& k) { return k.k2 / b.b2; };
  const L top = [](const Params& b, const LevelValues& k) { return k.k1 / b.b1 + k.k2 / b.b2; };

  constexpr double h = kPi / 2.0;
  std::vector<GkCriticalPoint> out;
  out.reserve(16);
  auto add = std::array{-h, h};
  for (double t1 : add)
    for (double t2 : {0.0, kPi}) out.push_back({t1, t2, MorseKind::Minimum, zero});
  for (double t1 : add)
    for (double t2 : {h, 3.0 * h}) out.push_back({t1, t2, MorseKind::Saddle, second});
  for (double t1 : {0.0, kPi})
    for (double t2 : {0.0, kPi}) out.push_back({t1, t2, MorseKind::Saddle, first});
  for (double t1 : {0.0, kPi})
    for (double t2 : {h, 3.0 * h}) out.push_back({t1, t2, MorseKind::Maximum, top});
  return out;
}

// ---------------------------------------------------------------------------
// Pixel model of U_k.

/// n x n boolean grid over the flat torus.  Cell (i, j) covers
/// theta1 in [-pi/2 + i h, -pi/2 + (i+1) h), theta2 in [j h, (j+1) h), h = 2 pi / n.
struct TorusGrid {
  int n = 0;
  std::vector<std::uint8_t> cells;  // row-major in j (theta2), column i (theta1)

  bool at(int i, int j) const { return cells[index(i, j)] != 0; }
  std::size_t index(int i, int j) const {
    const int ii = ((i % n) + n) % n;
    const int jj = ((j % n) + n) % n;
    return static_cast<std::size_t>(jj) * static_cast<std::size_t>(n) + static_cast<std::size_t>(ii);
  }
  double cell_size() const { return kTwoPi / n; }
  double theta1_center(int i) const { return -kPi / 2.0 + (i + 0.5) * cell_size(); }
  double theta2_center(int j) const { return (j + 0.5) * cell_size(); }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto v : cells) c += v;
    return c;
  }
};

inline TorusGrid uk_grid(const Params& b, const LevelValues& k, int n) {
  if (n < 16) throw Error(ErrorCode::InvalidInput, "grid size must be at least 16");
  const double eps = gk_data(b, k).eps;
  TorusGrid g;
  g.n = n;
  g.cells.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      g.cells[g.index(i, j)] = g_value(g.theta1_center(i), g.theta2_center(j), b, k) > eps ? 1 : 0;
    }
  }
  return g;
}

struct GridComponents {
  int count = 0;
  std::vector<int> labels;  // -1 for cells outside the set
};

/// 4-connected components of the true cells, with toric wrap-around.
inline GridComponents label_components(const TorusGrid& g) {
  GridComponents out;
  out.labels.assign(g.cells.size(), -1);
  std::vector<std::pair<int, int>> stack;
  for (int j = 0; j < g.n; ++j) {
    for (int i = 0; i < g.n; ++i) {
      const std::size_t idx = g.index(i, j);
      if (!g.cells[idx] || out.labels[idx] >= 0) continue;
      const int label = out.count++;
      out.labels[idx] = label;
      stack.emplace_back(i, j);
      while (!stack.empty()) {
        const auto [ci, cj] = stack.back();
        stack.pop_back();
        const std::array<std::pair<int, int>, 4> nbrs{{{ci + 1, cj}, {ci - 1, cj}, {ci, cj + 1}, {ci, cj - 1}}};
        for (const auto& [ni, nj] : nbrs) {
          const std::size_t nidx = g.index(ni, nj);
          if (g.cells[nidx] && out.labels[nidx] < 0) {
            out.labels[nidx] = label;
            stack.emplace_back(ni, nj);
          }
        }
      }
    }
  }
  return out;
}

/// Euler characteristic V - E + F of the closed-cell complex spanned by the
/// cells accepted by `in`, with 4-connectivity: a grid vertex shared only by two
/// diagonal cells counts as two vertices.
template <class Pred>
long euler_characteristic(int n, Pred&& in) {
  auto wrap = [n](int v) { return ((v % n) + n) % n; };
  long faces = 0, shared_edges = 0, vertices = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const bool c = in(i, j);
      if (c) {
        ++faces;
        if (in(wrap(i + 1), j)) ++shared_edges;
        if (in(i, wrap(j + 1))) ++shared_edges;
      }
      // Vertex at the lower-left corner of cell (i, j); its four cells in
      // cyclic order around it.
      const std::array<bool, 4> ring{in(wrap(i - 1), wrap(j - 1)), in(i, wrap(j - 1)), c, in(wrap(i - 1), j)};
      int on = 0, runs = 0;
      for (int r = 0; r < 4; ++r) {
        on += ring[r];
        if (ring[r] && !ring[(r + 3) % 4]) ++runs;
      }
      vertices += on == 4 ? 1 : runs;
    }
  }
  const long edges = 4 * faces - shared_edges;
  return vertices - edges + faces;
}

struct Topology {
  int components = 0;
  std::vector<int> genus_per_component;
  int euler = 0;

  bool operator==(const Topology&) const = default;
};

inline Topology topology_from_genera(std::vector<int> genera) {
  Topology t;
  t.components = static_cast<int>(genera.size());
  for (int g : genera) t.euler += 2 - 2 * g;
  t.genus_per_component = std::move(genera);
  return t;
}

/// Topology of S_k as the double of closure(U_k) along its boundary: each
/// component C of U_k contributes one closed surface of Euler characteristic
/// 2 chi(C), except the whole torus (no boundary) which contributes two tori.
inline Topology topology_via_construction(const Params& b, const LevelValues& k, int n = 512) {
  require_valid(b);
  require_valid(k);
  const Region region = classify_region(b, k);
  if (region.tag == RegionTag::Singular) {
    throw Error(ErrorCode::UnsupportedRegion,
                "S_k is not a smooth surface here (" + std::string(to_string(*region.singular_cause)) +
                    "): requires k1 k2 != 0, k1 != b1, k2 != b2, k1/b1 + k2/b2 != 1");
  }
  if (n < 64) throw Error(ErrorCode::InvalidInput, "topology grid size must be at least 64");

  const TorusGrid grid = uk_grid(b, k, n);
  if (grid.count() == grid.cells.size()) return topology_from_genera({1, 1});

  const GridComponents comps = label_components(grid);
  std::vector<int> genera;
  genera.reserve(static_cast<std::size_t>(comps.count));
  for (int c = 0; c < comps.count; ++c) {
    const long chi = euler_characteristic(n, [&](int i, int j) { return comps.labels[grid.index(i, j)] == c; });
    genera.push_back(static_cast<int>(1 - chi));
  }
  return topology_from_genera(std::move(genera));
}

}  // namespace suslov
