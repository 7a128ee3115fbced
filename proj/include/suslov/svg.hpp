#pragma once

// Static SVG portraits: the flat torus picture of U_k with orbits and
// equilibria, and the (k1, k2) bifurcation diagram.  Output is a pure
// function of the scene; numbers are printed with fixed precision so reruns
// are byte-identical.

#include <array>
#include <cstdio>
#include <algorithm>
#include <string>
#include <vector>

#include "suslov/core.hpp"
#include "suslov/critical.hpp"
#include "suslov/levelset.hpp"
#include "suslov/projection.hpp"

namespace suslov {

using Point2 = std::array<double, 2>;
using Polyline = std::vector<Point2>;

namespace svg {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

/// Affine map from a data rectangle onto a square pixel viewport (y up).
struct Frame {
  double x0, x1, y0, y1;
  double size = 640.0;
  double margin = 40.0;

  double px(double x) const { return margin + (x - x0) / (x1 - x0) * size; }
  double py(double y) const { return margin + (1.0 - (y - y0) / (y1 - y0)) * size; }
  double total() const { return size + 2.0 * margin; }
};

class Document {
 public:
  explicit Document(const Frame& f) : f_(f) {
    const std::string t = num(f.total());
    out_ += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + t + "\" height=\"" + t +
            "\" viewBox=\"0 0 " + t + " " + t + "\">\n";
    out_ += "<defs><clipPath id=\"plot\"><rect x=\"" + num(f.margin) + "\" y=\"" + num(f.margin) + "\" width=\"" +
            num(f.size) + "\" height=\"" + num(f.size) + "\"/></clipPath></defs>\n";
    out_ += "<rect class=\"frame\" x=\"" + num(f.margin) + "\" y=\"" + num(f.margin) + "\" width=\"" + num(f.size) +
            "\" height=\"" + num(f.size) + "\" fill=\"white\" stroke=\"black\" stroke-width=\"1\"/>\n";
  }

  void open(const std::string& cls, const std::string& attrs = "") {
    out_ += "<g class=\"" + cls + "\"" + (attrs.empty() ? "" : " " + attrs) + ">\n";
  }
  void close() { out_ += "</g>\n"; }

  /// Data-space rectangle [x, x + w] x [y, y + h].
  void rect(double x, double y, double w, double h, const std::string& attrs = "") {
    out_ += "<rect x=\"" + num(f_.px(x)) + "\" y=\"" + num(f_.py(y + h)) + "\" width=\"" + num(f_.px(x + w) - f_.px(x)) +
            "\" height=\"" + num(f_.py(y) - f_.py(y + h)) + "\"" + (attrs.empty() ? "" : " " + attrs) + "/>\n";
  }

  void line(double xa, double ya, double xb, double yb, const std::string& attrs) {
    out_ += "<line x1=\"" + num(f_.px(xa)) + "\" y1=\"" + num(f_.py(ya)) + "\" x2=\"" + num(f_.px(xb)) + "\" y2=\"" +
            num(f_.py(yb)) + "\" " + attrs + "/>\n";
  }

  void polyline(const Polyline& pts, const std::string& attrs) {
    if (pts.size() < 2) return;
    out_ += "<polyline points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) out_ += ' ';
      out_ += num(f_.px(pts[i][0])) + "," + num(f_.py(pts[i][1]));
    }
    out_ += "\" " + attrs + "/>\n";
  }

  /// One path of independent two-point segments.
  void segments(const std::vector<std::array<Point2, 2>>& segs, const std::string& attrs) {
    if (segs.empty()) return;
    out_ += "<path d=\"";
    for (std::size_t i = 0; i < segs.size(); ++i) {
      if (i) out_ += ' ';
      out_ += "M" + num(f_.px(segs[i][0][0])) + " " + num(f_.py(segs[i][0][1])) + "L" + num(f_.px(segs[i][1][0])) +
              " " + num(f_.py(segs[i][1][1]));
    }
    out_ += "\" " + attrs + "/>\n";
  }

  void circle(double x, double y, double r, const std::string& attrs) {
    out_ += "<circle cx=\"" + num(f_.px(x)) + "\" cy=\"" + num(f_.py(y)) + "\" r=\"" + num(r) + "\" " + attrs + "/>\n";
  }

  void text(double px, double py, const std::string& s, const std::string& attrs = "") {
    out_ += "<text x=\"" + num(px) + "\" y=\"" + num(py) + "\" font-family=\"sans-serif\" font-size=\"12\"" +
            (attrs.empty() ? "" : " " + attrs) + ">" + s + "</text>\n";
  }

  const Frame& frame() const { return f_; }

  std::string finish() {
    out_ += "</svg>\n";
    return std::move(out_);
  }

 private:
  Frame f_;
  std::string out_;
};

}  // namespace svg

// ---------------------------------------------------------------------------
// Flat torus portrait.

struct TorusScene {
  /// n x n membership grid of U_k (empty for a scene without shading).
  int grid_n = 0;
  std::vector<int> labels;  // component id per cell, -1 outside
  int components = 0;
  std::vector<std::array<Point2, 2>> boundary;
  std::vector<Polyline> orbits;
  std::vector<Point2> critical;
};

namespace detail {

/// Zero set of f on the toric corner lattice by marching squares.
template <class F>
std::vector<std::array<Point2, 2>> marching_squares(int n, F&& f) {
  const double h = kTwoPi / n;
  std::vector<double> v(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  auto at = [&](int i, int j) -> double& {
    return v[static_cast<std::size_t>((j % n) * n + (i % n))];
  };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) at(i, j) = f(-kPi / 2.0 + i * h, j * h);

  std::vector<std::array<Point2, 2>> segs;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double x = -kPi / 2.0 + i * h, y = j * h;
      // Corners counter-clockwise from lower-left.
      const std::array<double, 4> c{at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
      const std::array<Point2, 4> p{Point2{x, y}, Point2{x + h, y}, Point2{x + h, y + h}, Point2{x, y + h}};
      int mask = 0;
      for (int r = 0; r < 4; ++r) mask |= (c[r] > 0.0 ? 1 : 0) << r;
      if (mask == 0 || mask == 15) continue;
      auto cut = [&](int e) {
        const int a = e, b = (e + 1) % 4;
        const double t = c[a] / (c[a] - c[b]);
        return Point2{p[a][0] + t * (p[b][0] - p[a][0]), p[a][1] + t * (p[b][1] - p[a][1])};
      };
      std::vector<int> edges;
      for (int e = 0; e < 4; ++e) {
        if ((c[e] > 0.0) != (c[(e + 1) % 4] > 0.0)) edges.push_back(e);
      }
      if (edges.size() == 2) {
        segs.push_back({cut(edges[0]), cut(edges[1])});
      } else if (edges.size() == 4) {
        const double centre = f(x + h / 2.0, y + h / 2.0);
        const bool lower_left_in = c[0] > 0.0;
        if ((centre > 0.0) == lower_left_in) {
          segs.push_back({cut(0), cut(1)});
          segs.push_back({cut(2), cut(3)});
        } else {
          segs.push_back({cut(3), cut(0)});
          segs.push_back({cut(1), cut(2)});
        }
      }
    }
  }
  return segs;
}

/// Splits a lifted (unwrapped) curve into pieces inside the fundamental domain,
/// inserting the crossing points at the edges.
inline std::vector<Polyline> wrap_polyline(const Polyline& lifted) {
  std::vector<Polyline> out;
  if (lifted.empty()) return out;
  auto cell = [](const Point2& q) {
    return std::array<long, 2>{static_cast<long>(std::floor((q[0] + kPi / 2.0) / kTwoPi)),
                               static_cast<long>(std::floor(q[1] / kTwoPi))};
  };
  auto local = [](const Point2& q, const std::array<long, 2>& c) {
    return Point2{q[0] - kTwoPi * static_cast<double>(c[0]), q[1] - kTwoPi * static_cast<double>(c[1])};
  };
  auto current = cell(lifted.front());
  out.push_back({local(lifted.front(), current)});
  for (std::size_t i = 1; i < lifted.size(); ++i) {
    const Point2 a = lifted[i - 1], b = lifted[i];
    const auto target = cell(b);
    // Crossing parameters along a -> b for each grid line passed.
    std::vector<std::pair<double, int>> hits;
    for (int d = 0; d < 2; ++d) {
      const double offset = d == 0 ? -kPi / 2.0 : 0.0;
      if (target[d] == current[d]) continue;
      const long step = target[d] > current[d] ? 1 : -1;
      for (long c = current[d]; c != target[d]; c += step) {
        const double edge = offset + kTwoPi * static_cast<double>(step > 0 ? c + 1 : c);
        hits.emplace_back((edge - a[d]) / (b[d] - a[d]), d * 2 + (step > 0 ? 1 : 0));
      }
    }
    std::sort(hits.begin(), hits.end());
    for (const auto& [t, code] : hits) {
      const Point2 q{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
      out.back().push_back(local(q, current));
      current[code / 2] += (code % 2) ? 1 : -1;
      out.push_back({local(q, current)});
    }
    out.back().push_back(local(b, current));
  }
  return out;
}

}  // namespace detail

/// Projected orbit of the linear flow through `start`: the full chord when it
/// is bounded, otherwise one closed winding (rational slope) or a fixed
/// stretch of line.
inline Polyline orbit_chord_lift(const TorusPoint& start, const Params& b, const LevelValues& k,
                                 double sample = 0.01) {
  const Chord chord = trace_chord(start, b, k);
  double lo = chord.lambda_minus, hi = chord.lambda_plus;
  if (!chord.bounded) {
    const auto ratio = detect_rational_ratio(b);
    const double turns = ratio ? static_cast<double>(ratio->p) : 16.0;
    lo = 0.0;
    hi = kTwoPi * turns / chord.direction[0];
  }
  const auto n = static_cast<std::size_t>(std::max(2.0, std::ceil((hi - lo) / sample) + 1.0));
  Polyline pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lambda = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    pts.push_back({chord.origin_theta1 + lambda * chord.direction[0], chord.origin_theta2 + lambda * chord.direction[1]});
  }
  return pts;
}

inline TorusScene make_torus_scene(const Params& b, const LevelValues& k, int grid_n,
                                   const std::vector<State>& orbit_starts) {
  TorusScene scene;
  const TorusGrid grid = uk_grid(b, k, grid_n);
  const GridComponents comps = label_components(grid);
  scene.grid_n = grid_n;
  scene.labels = comps.labels;
  scene.components = comps.count;

  const double eps = gk_data(b, k).eps;
  if (eps >= 0.0) {
    scene.boundary = detail::marching_squares(grid_n, [&](double t1, double t2) { return g_value(t1, t2, b, k) - eps; });
  }
  for (const State& s : orbit_starts) {
    for (auto& piece : detail::wrap_polyline(orbit_chord_lift(to_torus(s, b, k), b, k))) {
      scene.orbits.push_back(std::move(piece));
    }
  }
  if (classify_region(b, k).tag != RegionTag::Singular) {
    for (const auto& cp : find_critical_points(b, k)) {
      const TorusPoint t = to_torus(cp.state, b, k);
      scene.critical.push_back({t.theta1, t.theta2});
    }
  }
  return scene;
}

inline std::string render_svg(const TorusScene& scene) {
  svg::Frame frame{-kPi / 2.0, 3.0 * kPi / 2.0, 0.0, kTwoPi};
  svg::Document doc(frame);
  const std::string clip = "clip-path=\"url(#plot)\"";

  doc.open("shading", clip);
  if (scene.grid_n > 0) {
    const double h = kTwoPi / scene.grid_n;
    const int n = scene.grid_n;
    for (int c = 0; c < scene.components; ++c) {
      doc.open("component", "fill=\"#9ecae1\" stroke=\"none\" shape-rendering=\"crispEdges\"");
      for (int j = 0; j < n; ++j) {
        int i = 0;
        while (i < n) {
          if (scene.labels[static_cast<std::size_t>(j * n + i)] != c) {
            ++i;
            continue;
          }
          int e = i;
          while (e < n && scene.labels[static_cast<std::size_t>(j * n + e)] == c) ++e;
          doc.rect(-kPi / 2.0 + i * h, j * h, (e - i) * h, h);
          i = e;
        }
      }
      doc.close();
    }
  }
  doc.close();

  doc.open("boundary", clip);
  doc.segments(scene.boundary, "fill=\"none\" stroke=\"#08306b\" stroke-width=\"1.5\"");
  doc.close();

  doc.open("grid");
  const std::string dash = "stroke=\"gray\" stroke-width=\"1\" stroke-dasharray=\"6,4\"";
  for (double t1 : {-kPi / 2.0, kPi / 2.0}) doc.line(t1, 0.0, t1, kTwoPi, dash);
  for (double t2 : {0.0, kPi}) doc.line(-kPi / 2.0, t2, 3.0 * kPi / 2.0, t2, dash);
  doc.close();

  doc.open("orbits", clip);
  for (const auto& o : scene.orbits) doc.polyline(o, "fill=\"none\" stroke=\"#cb181d\" stroke-width=\"1\"");
  doc.close();

  doc.open("critical-points");
  for (const auto& p : scene.critical) doc.circle(p[0], p[1], 4.0, "class=\"critical\" fill=\"black\"");
  doc.close();

  const auto& f = doc.frame();
  doc.text(f.margin + f.size / 2.0 - 10.0, f.total() - 10.0, "theta1");
  doc.text(4.0, f.margin + f.size / 2.0, "theta2");
  return doc.finish();
}

// ---------------------------------------------------------------------------
// Bifurcation diagram of the (k1, k2) quadrant.

struct PlaneCell {
  double k1 = 0.0, k2 = 0.0;  // lower-left corner
  Region region;
};

struct PlaneScene {
  Params b;
  double k1_min = 0.0, k1_max = 1.0, k2_min = 0.0, k2_max = 1.0;
  double cell_w = 0.0, cell_h = 0.0;
  std::vector<PlaneCell> cells;
};

inline std::string_view region_fill(const Region& r) {
  if (r.subregion) {
    switch (*r.subregion) {
      case Subregion::Sub12: return "#fdae6b";
      case Subregion::Sub3: return "#fd8d3c";
      case Subregion::Sub4: return "#fdd0a2";
      case Subregion::C1:
      case Subregion::C2: return "#a63603";
    }
  }
  switch (r.tag) {
    case RegionTag::D1: return "#c6dbef";
    case RegionTag::D2: return "#a1d99b";
    case RegionTag::D3: return "#dadaeb";
    case RegionTag::D4: return "#fee6ce";
    case RegionTag::D5: return "#fcbba1";
    case RegionTag::Singular: return "#525252";
  }
  return "#ffffff";
}

/// Both branches of the Delta = 0 curve, sampled along the smaller-b axis.
inline std::vector<Polyline> discriminant_curve(const Params& b, double k_max, int samples = 400) {
  std::vector<Polyline> out;
  if (equal_b(b)) return out;
  const bool swap = b.b1 < b.b2;
  const double hi = swap ? b.b2 : b.b1, lo = swap ? b.b1 : b.b2;
  const double a = hi - lo;
  const double top = std::min(hi, k_max);
  for (int branch : {1, -1}) {
    Polyline pl;
    for (int i = 0; i <= samples; ++i) {
      const double kh = top * i / samples;  // k on the larger-b axis
      const double other = lo + 2.0 * a - (kh - lo) + branch * 2.0 * std::sqrt(std::max(0.0, a * (hi - kh)));
      if (other < 0.0) continue;
      pl.push_back(swap ? Point2{other, kh} : Point2{kh, other});
    }
    out.push_back(std::move(pl));
  }
  return out;
}

inline std::string render_svg(const PlaneScene& scene) {
  svg::Frame frame{scene.k1_min, scene.k1_max, scene.k2_min, scene.k2_max};
  svg::Document doc(frame);
  const std::string clip = "clip-path=\"url(#plot)\"";
  const Params& b = scene.b;

  doc.open("regions", clip + " stroke=\"none\" shape-rendering=\"crispEdges\"");
  for (const auto& c : scene.cells) {
    std::string cls = std::string(to_string(c.region.tag));
    if (c.region.subregion) cls += " " + std::string(to_string(*c.region.subregion));
    doc.rect(c.k1, c.k2, scene.cell_w, scene.cell_h,
             "class=\"" + cls + "\" fill=\"" + std::string(region_fill(c.region)) + "\"");
  }
  doc.close();

  doc.open("boundaries", clip + " fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"");
  doc.line(b.b1, scene.k2_min, b.b1, scene.k2_max, "class=\"k1-eq-b1\"");
  doc.line(scene.k1_min, b.b2, scene.k1_max, b.b2, "class=\"k2-eq-b2\"");
  doc.line(0.0, b.b2, b.b1, 0.0, "class=\"ratio-sum-one\"");
  doc.close();

  if (!equal_b(b)) {
    doc.open("discriminant", clip + " fill=\"none\" stroke=\"#a63603\" stroke-width=\"1.5\"");
    for (const auto& pl : discriminant_curve(b, std::max(scene.k1_max, scene.k2_max))) {
      doc.polyline(pl, "class=\"delta-zero\"");
    }
    const double line = 2.0 * std::max(b.b1, b.b2);
    doc.line(0.0, line, line, 0.0, "class=\"sum-line\" stroke-dasharray=\"6,4\"");
    doc.close();
  }

  const auto& f = doc.frame();
  doc.text(f.margin + f.size / 2.0 - 5.0, f.total() - 10.0, "k1");
  doc.text(8.0, f.margin + f.size / 2.0, "k2");
  return doc.finish();
}

}  // namespace suslov
