// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "suslov/suslov.hpp"

using namespace suslov;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

const Params kB41{4, 1};
const Params kB11{1, 1};

/// One k per region D1..D5 for the given system.
std::vector<LevelValues> region_samples(const Params& b) {
  if (b == kB41) return {{1, 0.5}, {2, 0.75}, {5, 0.5}, {2, 3}, {4.4, 1.1}};
  return {{0.3, 0.4}, {0.7, 0.7}, {1.5, 0.5}, {0.5, 1.5}, {1.5, 1.5}};
}

Check criterion1() {
  Check c;
  struct Case {
    LevelValues k;
    RegionTag tag;
    std::optional<Subregion> sub;
  };
  const std::vector<Case> cases{{{1, 0.5}, RegionTag::D1, std::nullopt},
                                {{2, 0.75}, RegionTag::D2, std::nullopt},
                                {{4.4, 1.1}, RegionTag::D5, std::nullopt},
                                {{3.4, 1.2}, RegionTag::D4, Subregion::Sub12}};
  for (const auto& cs : cases) {
    const auto t0 = Clock::now();
    Region r;
    for (int rep = 0; rep < 1000; ++rep) r = classify_region(kB41, cs.k);
    const double per_call = seconds_since(t0) / 1000;
    c.require(r.tag == cs.tag && r.subregion == cs.sub, "wrong region for k=(" + fmt(cs.k.k1) + "," + fmt(cs.k.k2) + ")");
    c.require(per_call < 1e-3, "classify_region took " + fmt(per_call) + " s");
  }
  return c;
}

Check criterion2() {
  Check c;
  struct Case {
    Params b;
    LevelValues k;
  };
  const std::vector<Case> cases{
      {kB41, {1, 0.5}},   {kB41, {0.5, 0.3}},  {kB41, {2, 0.2}},   {kB41, {2, 0.75}}, {kB41, {3, 0.5}},
      {kB41, {1.5, 0.8}}, {kB41, {5, 0.5}},    {kB41, {6, 0.2}},   {kB41, {3.4, 1.2}}, {kB41, {2, 3}},
      {kB41, {1, 14}},    {kB41, {3.25, 1.75}}, {kB41, {4.4, 1.1}}, {kB41, {6, 3}},     {kB11, {0.3, 0.4}},
      {kB11, {0.2, 0.2}}, {kB11, {0.7, 0.7}},  {kB11, {0.6, 0.9}}, {kB11, {1.5, 0.5}}, {kB11, {2, 0.3}},
      {kB11, {0.5, 1.5}}, {kB11, {0.3, 2}},    {kB11, {1.5, 1.5}}, {kB11, {2, 3}},     {kB11, {1.2, 1.1}},
  };
  std::array<int, 5> seen{};
  const auto t0 = Clock::now();
  for (const auto& cs : cases) {
    const Region r = classify_region(cs.b, cs.k);
    std::vector<int> expected;
    switch (r.tag) {
      case RegionTag::D1:
      case RegionTag::D3:
      case RegionTag::D4: expected = {1, 1}; break;
      case RegionTag::D2: expected = {5}; break;
      case RegionTag::D5: expected = {0, 0, 0, 0}; break;
      case RegionTag::Singular: c.require(false, "sample is singular"); continue;
    }
    ++seen[static_cast<int>(r.tag)];
    const Topology t128 = topology_via_construction(cs.b, cs.k, 128);
    const Topology t512 = topology_via_construction(cs.b, cs.k, 512);
    const std::string where = "b=(" + fmt(cs.b.b1) + "," + fmt(cs.b.b2) + ") k=(" + fmt(cs.k.k1) + "," + fmt(cs.k.k2) + ")";
    c.require(t512 == topology_from_genera(expected), "unexpected topology at " + where);
    c.require(t128 == t512, "grid dependence at " + where);
    const bool delta_zero = !equal_b(cs.b) && std::abs(discriminant_value(cs.b, cs.k)) <= kTau * discriminant_scale(cs.b, cs.k);
    if (!delta_zero) c.require(euler_char_ph(find_critical_points(cs.b, cs.k)) == t512.euler, "index sum differs at " + where);
  }
  const double elapsed = seconds_since(t0);
  for (int s : seen) c.require(s > 0, "a region is not covered");
  c.require(elapsed < 5.0, "took " + fmt(elapsed) + " s");
  c.detail += (c.detail.empty() ? "" : "; ") + std::to_string(cases.size()) + " samples in " + fmt(elapsed) + " s";
  return c;
}

/// Criteria 3 and 4 share their runs.
std::pair<Check, Check> criteria3and4() {
  Check c3, c4;
  double worst = 0, worst_w = 0, worst_f3 = 0;
  for (const Params& b : {kB41, kB11}) {
    const ExtraIntegral e = *detect_rational_ratio(b);
    std::mt19937_64 rng(2024);
    for (const LevelValues& k : region_samples(b)) {
      for (int i = 0; i < 20; ++i) {
        const State s0 = random_state_on_level(b, k, rng);
        const Trajectory tr = integrate(s0, b, 1e-3, 100.0, {10});
        worst = std::max({worst, tr.drift.f1, tr.drift.f2, tr.drift.norm});
        const auto w0 = extra_integral_value(s0, b, e);
        const double f30 = s0.m1 * s0.m2 - b.b1 * s0.gamma1 * s0.gamma2;
        for (const State& s : tr.states) {
          worst_w = std::max(worst_w, std::abs(extra_integral_value(s, b, e) - w0));
          if (b == kB11) worst_f3 = std::max(worst_f3, std::abs(s.m1 * s.m2 - b.b1 * s.gamma1 * s.gamma2 - f30));
        }
      }
    }
  }
  c3.require(worst <= 1e-8, "");
  c3.detail = "max drift " + fmt(worst);
  c4.require(worst_w <= 1e-8 && worst_f3 <= 1e-8, "");
  c4.detail = "max |W(t)-W(0)| " + fmt(worst_w) + ", bilinear integral drift " + fmt(worst_f3);
  return {c3, c4};
}

Check criterion5() {
  Check c;
  auto kinds = [](const std::vector<CriticalPoint>& pts) {
    std::array<int, 3> n{};
    for (const auto& p : pts) ++n[static_cast<int>(p.kind)];
    return n;  // saddles, centers, degenerate
  };
  auto residuals_ok = [](const std::vector<CriticalPoint>& pts, const Params& b, const LevelValues& k) {
    for (const auto& p : pts) {
      const Conserved q = conserved_quantities(p.state, b);
      if (norm(vector_field(p.state, b)) > 1e-12 || std::abs(q.f1 - k.k1) > 1e-12 || std::abs(q.f2 - k.k2) > 1e-12 ||
          std::abs(q.norm - 1) > 1e-12 || p.state.gamma3 != 0.0)
        return false;
    }
    return true;
  };
  struct Row {
    Params b;
    LevelValues k;
    std::size_t count;
    std::array<int, 3> kinds;
    const char* name;
  };
  const std::vector<Row> rows{
      {kB11, {0.3, 0.4}, 0, {0, 0, 0}, "b1=b2 D1"},   {kB11, {0.7, 0.7}, 8, {8, 0, 0}, "b1=b2 D2"},
      {kB11, {1.5, 0.5}, 0, {0, 0, 0}, "b1=b2 D3"},   {kB11, {0.5, 1.5}, 0, {0, 0, 0}, "b1=b2 D4"},
      {kB11, {1.5, 1.5}, 8, {0, 8, 0}, "b1=b2 D5"},   {kB41, {1, 0.5}, 0, {0, 0, 0}, "D1"},
      {kB41, {2, 0.75}, 8, {8, 0, 0}, "D2"},          {kB41, {5, 0.5}, 0, {0, 0, 0}, "D3"},
      {kB41, {1, 14}, 0, {0, 0, 0}, "Sub3"},          {kB41, {4.4, 1.1}, 8, {0, 8, 0}, "D5"},
      {kB41, {3.4, 1.2}, 16, {8, 8, 0}, "Sub12"},     {kB41, {3.25, 1.75}, 8, {0, 0, 8}, "C1"},
      {kB41, {2, 3}, 0, {0, 0, 0}, "Sub4"},           {kB41, {1, 13}, 0, {0, 0, 0}, "C2"},
  };
  for (const auto& r : rows) {
    const auto pts = find_critical_points(r.b, r.k);
    c.require(pts.size() == r.count, std::string("count mismatch in ") + r.name);
    c.require(kinds(pts) == r.kinds, std::string("classification mismatch in ") + r.name);
    c.require(residuals_ok(pts, r.b, r.k), std::string("residual above 1e-12 in ") + r.name);
  }
  c.detail = c.ok ? std::to_string(rows.size()) + " table rows" : c.detail;
  return c;
}

Check criterion6() {
  Check c;
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(0.05, 2.5);
  int cases = 0, lower = 0, nonempty = 0;
  while (cases < 50) {
    const Params b{u(rng), u(rng)};
    const LevelValues k{u(rng) * b.b1, u(rng) * b.b2};
    if (classify_region(b, k).tag == RegionTag::Singular) continue;
    // Near-double roots are resolved by neither solver to 1e-8; skip them.
    if (!equal_b(b) && std::abs(discriminant_value(b, k)) < 1e-3 * discriminant_scale(b, k)) continue;
    const auto fast = find_critical_points(b, k);
    const auto slow = oracle::brute_force_equilibria(b, k);
    bool same = fast.size() == slow.size();
    for (const auto& p : fast) {
      double best = 1e9;
      for (const auto& s : slow) best = std::min(best, distance(p.state, s));
      same = same && best <= 1e-8;
    }
    c.require(same, "mismatch at b=(" + fmt(b.b1) + "," + fmt(b.b2) + ") k=(" + fmt(k.k1) + "," + fmt(k.k2) + ")");
    ++cases;
    lower += b.b1 < b.b2;
    nonempty += !fast.empty();
  }
  c.require(lower > 0, "no b1 < b2 sample");
  if (c.ok) c.detail = "50 systems, " + std::to_string(lower) + " with b1<b2, " + std::to_string(nonempty) + " with equilibria";
  return c;
}

Check criterion7() {
  Check c;
  const LevelValues k{1, 0.5};
  std::mt19937_64 rng(707);
  double worst = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const State s0 = random_state_on_level(kB41, k, rng);
    const Trajectory tr = integrate(s0, kB41, 1e-3, 20.0, {20});
    TorusPoint prev = to_torus(tr.states.front(), kB41, k);
    double d1 = 0, d2 = 0;
    for (std::size_t i = 1; i < tr.states.size(); ++i) {
      c.require(tr.states[i].gamma3 * s0.gamma3 > 0, "gamma3 changed sign in D1");
      const TorusPoint t = to_torus(tr.states[i], kB41, k);
      d1 += angle_difference(t.theta1, prev.theta1);
      d2 += angle_difference(t.theta2, prev.theta2);
      prev = t;
    }
    worst = std::max(worst, std::abs(d2 / d1 - flow_slope(kB41)));
  }
  c.require(worst <= 1e-6, "");
  c.detail = "max slope error " + fmt(worst);
  return c;
}

Check criterion8() {
  Check c;
  const LevelValues k{1.5, 1.5};
  const State center = find_critical_points(kB11, k).front().state;
  // Displace by 1e-3 along gamma3 and re-project onto S_k.
  State s = center;
  s.gamma3 = 1e-3;
  const double scale = std::sqrt(1 - s.gamma3 * s.gamma3) / std::hypot(s.gamma1, s.gamma2);
  s.gamma1 *= scale;
  s.gamma2 *= scale;
  s.m1 = std::copysign(std::sqrt(k.k1 - s.gamma1 * s.gamma1), center.m1);
  s.m2 = std::copysign(std::sqrt(k.k2 - s.gamma2 * s.gamma2), center.m2);
  const auto period = measure_period(s, kB11, 1e-3, 100.0);
  c.require(period.has_value(), "no return");
  if (period) {
    const double rel = std::abs(*period - kTwoPi) / kTwoPi;
    c.require(rel <= 0.01, "");
    c.detail = "period " + fmt(*period) + ", relative error " + fmt(rel);
  }
  return c;
}

Check criterion9() {
  Check c;
  const LevelValues sub4{2, 3};
  c.require(discriminant(kB41, sub4).delta < 0, "sample not in Delta < 0");
  std::mt19937_64 rng(909);
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const State s = random_state_on_level(kB41, sub4, rng);
    const auto v = detect_periodicity(s, kB41, sub4);
    c.require(v.kind == VerdictKind::Periodic, "non-periodic orbit in Delta < 0");
    if (v.return_residual) worst = std::max(worst, *v.return_residual);
  }
  c.require(worst <= 1e-6, "residual " + fmt(worst));
  const LevelValues d1{1, 0.5};
  for (int i = 0; i < 20; ++i) {
    const State s = random_state_on_level(kB41, d1, rng);
    const auto v = detect_periodicity(s, kB41, d1);
    c.require(v.kind == VerdictKind::Periodic && v.winding && v.winding->p == 2 && v.winding->q == 1,
              "D1 orbit not periodic with winding (1,2)");
    if (v.return_residual) worst = std::max(worst, *v.return_residual);
  }
  c.require(worst <= 1e-6, "residual " + fmt(worst));
  c.detail += (c.detail.empty() ? "" : "; ") + std::string("max first-return residual ") + fmt(worst);
  return c;
}

Check criterion10() {
  Check c;
  std::mt19937_64 rng(1010);
  std::normal_distribution<double> n(0, 1);
  int compared = 0;
  std::array<int, 5> hist{};
  for (const LevelValues& k : region_samples(kB41)) {
    std::vector<std::array<double, 3>> pts;
    for (int i = 0; i < 10000; ++i) {
      const double a = n(rng), b = n(rng), d = n(rng);
      const double r = std::sqrt(a * a + b * b + d * d);
      pts.push_back({a / r, b / r, d / r});
    }
    // Boundary and corner points of P_k, where they exist on the sphere.
    const double e1 = std::sqrt(k.k1 / kB41.b1), e2 = std::sqrt(k.k2 / kB41.b2);
    if (e1 < 1) pts.push_back({e1, 0, std::sqrt(1 - e1 * e1)});
    if (e2 < 1) pts.push_back({0, e2, std::sqrt(1 - e2 * e2)});
    if (e1 * e1 + e2 * e2 < 1) pts.push_back({e1, e2, std::sqrt(1 - e1 * e1 - e2 * e2)});
    for (const auto& g : pts) {
      const int a = dpm_multiplicity(g, kB41, k);
      c.require(a == oracle::direct_multiplicity(g, kB41, k), "multiplicity mismatch");
      ++hist[std::min(a, 4)];
      ++compared;
    }
  }
  c.require(hist[0] > 0 && hist[1] > 0 && hist[2] > 0 && hist[4] > 0, "not all multiplicities exercised");
  c.detail = std::to_string(compared) + " points; counts 0/1/2/4: " + std::to_string(hist[0]) + "/" +
             std::to_string(hist[1]) + "/" + std::to_string(hist[2]) + "/" + std::to_string(hist[4]);
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Check criterion11(const std::string& cli) {
  Check c;
  if (cli.empty()) {
    c.require(false, "CLI path not given");
    return c;
  }
  const auto dir = std::filesystem::temp_directory_path() / ("suslov_acceptance_" + std::to_string(Clock::now().time_since_epoch().count()));
  std::filesystem::create_directories(dir);
  const std::vector<std::pair<std::string, std::string>> runs{
      {"classify --b1 4 --b2 1 --k1 3.4 --k2 1.2", "classify.json"},
      {"critical-points --b1 4 --b2 1 --k1 3.4 --k2 1.2", "critical.json"},
      {"topology --b1 4 --b2 1 --k1 2 --k2 0.75 --grid-n 128", "topology.json"},
      {"simulate --b1 4 --b2 1 --k1 2 --k2 0.75 --t-end 5 --seed 77", "sim.csv"},
      {"project --b1 4 --b2 1 --k1 3.4 --k2 1.2 --grid-n 256 --seed 77", "torus.svg"},
      {"project --b1 4 --b2 1 --k1 2 --k2 3 --format json --seed 77 --orbits 2", "orbits.json"},
      {"sweep --b1 4 --b2 1 --sweep 0:8:0:2:24 --grid-n 64", "atlas.csv"},
  };
  int files = 0;
  for (const auto& [args, name] : runs) {
    std::vector<std::string> outputs;
    for (int rep = 0; rep < 2; ++rep) {
      const auto out = dir / (std::to_string(rep) + "_" + name);
      const std::string cmd = "\"" + cli + "\" " + args + " --out \"" + out.string() + "\"";
      c.require(std::system(cmd.c_str()) == 0, "command failed: " + args);
      std::string all = slurp(out);
      for (const char* extra : {".drift.json", ".svg"}) {
        const auto companion = std::filesystem::path(out.string() + extra);
        auto replaced = out;
        replaced.replace_extension(".svg");
        for (const auto& p : {companion, replaced}) {
          if (p != out && std::filesystem::exists(p)) all += "\n--\n" + slurp(p);
        }
      }
      outputs.push_back(std::move(all));
    }
    c.require(!outputs[0].empty() && outputs[0] == outputs[1], "outputs differ: " + args);
    ++files;
  }
  std::filesystem::remove_all(dir);
  if (c.ok) c.detail = std::to_string(files) + " commands byte-identical across reruns";
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Check()>& run) {
    Check c;
    try {
      c = run();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %2d: %s%s%s\n", c.ok ? "PASS" : "FAIL", id, name, c.detail.empty() ? "" : " -- ",
                c.detail.c_str());
    std::fflush(stdout);
    failures += !c.ok;
  };
  report(1, "region oracle vs figure parameters", criterion1);
  report(2, "topology by construction and by index sum", criterion2);
  std::pair<Check, Check> c34;
  report(3, "conservation of f1, f2, |gamma|^2", [&] {
    c34 = criteria3and4();
    return c34.first;
  });
  report(4, "extra integral for rational frequency ratio", [&] { return c34.second; });
  report(5, "critical-point tables", criterion5);
  report(6, "brute-force equilibrium equivalence", criterion6);
  report(7, "projected slope on D1 trajectories", criterion7);
  report(8, "linearized period near a D5 center", criterion8);
  report(9, "periodicity verdicts", criterion9);
  report(10, "DPM multiplicity", criterion10);
  report(11, "CLI determinism", [&] { return criterion11(cli); });
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
