#pragma once

// Command-line orchestration.  All numerics live in the library; this layer
// maps a RunConfig onto library calls and serializes the results as JSON,
// CSV or SVG.  Exit codes: 0 success, 1 domain error, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "suslov/core.hpp"
#include "suslov/critical.hpp"
#include "suslov/dynamics.hpp"
#include "suslov/levelset.hpp"
#include "suslov/projection.hpp"
#include "suslov/svg.hpp"

namespace suslov::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

inline constexpr std::string_view kSchemaVersion = "1";

enum class Command { Classify, CriticalPoints, Topology, Simulate, Project, Sweep };
enum class Format { Json, Csv, Svg };

inline std::string_view to_string(Command c) {
  switch (c) {
    case Command::Classify: return "classify";
    case Command::CriticalPoints: return "critical-points";
    case Command::Topology: return "topology";
    case Command::Simulate: return "simulate";
    case Command::Project: return "project";
    case Command::Sweep: return "sweep";
  }
  return "?";
}

inline std::string_view to_string(Format f) {
  switch (f) {
    case Format::Json: return "json";
    case Format::Csv: return "csv";
    case Format::Svg: return "svg";
  }
  return "?";
}

struct SweepRange {
  double k1_min = 0.0, k1_max = 0.0, k2_min = 0.0, k2_max = 0.0;
  int samples = 0;
};

struct RunConfig {
  Command command = Command::Classify;
  double b1 = 0.0, b2 = 0.0, k1 = 0.0, k2 = 0.0;
  bool have_b1 = false, have_b2 = false, have_k1 = false, have_k2 = false;
  double step = kDefaultStep;
  double t_end = 100.0;
  int grid_n = 512;
  std::optional<Format> format;
  std::string out_path;
  std::uint64_t seed = 0;
  std::optional<SweepRange> sweep;
  std::size_t stride = 1;
  int orbits = 4;
  unsigned threads = 0;  // 0: hardware concurrency

  Params params() const { return {b1, b2}; }
  LevelValues levels() const { return {k1, k2}; }
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Format default_format(Command c) {
  switch (c) {
    case Command::Simulate:
    case Command::Sweep: return Format::Csv;
    case Command::Project: return Format::Svg;
    default: return Format::Json;
  }
}

inline Format resolved_format(const RunConfig& c) { return c.format.value_or(default_format(c.command)); }

inline SweepRange parse_sweep(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 5) throw UsageError("--sweep expects k1min:k1max:k2min:k2max:n");
  SweepRange r;
  try {
    std::size_t used = 0;
    auto real = [&](const std::string& s) {
      const double v = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(v)) throw UsageError("bad number in --sweep: " + s);
      return v;
    };
    r.k1_min = real(parts[0]);
    r.k1_max = real(parts[1]);
    r.k2_min = real(parts[2]);
    r.k2_max = real(parts[3]);
    const long n = std::stol(parts[4], &used);
    if (used != parts[4].size()) throw UsageError("bad sample count in --sweep: " + parts[4]);
    if (n < 1 || n > 4096) throw UsageError("--sweep sample count must be in [1, 4096]");
    r.samples = static_cast<int>(n);
  } catch (const std::logic_error&) {
    throw UsageError("malformed --sweep range: " + spec);
  }
  if (!(r.k1_min >= 0.0 && r.k2_min >= 0.0 && r.k1_max > r.k1_min && r.k2_max > r.k2_min)) {
    throw UsageError("--sweep needs 0 <= min < max on both axes");
  }
  return r;
}

/// Checks the numeric preconditions of the selected command.
inline void validate(const RunConfig& c) {
  if (!c.have_b1 || !c.have_b2) throw UsageError("--b1 and --b2 are required");
  if (!is_valid(c.params())) throw UsageError("--b1 and --b2 must be finite and positive");
  if (c.command != Command::Sweep) {
    if (!c.have_k1 || !c.have_k2) throw UsageError("--k1 and --k2 are required for " + std::string(to_string(c.command)));
    if (!is_valid(c.levels())) throw UsageError("--k1 and --k2 must be finite and nonnegative");
  } else if (!c.sweep) {
    throw UsageError("sweep requires --sweep k1min:k1max:k2min:k2max:n");
  }
  if (!(c.step > 0.0) || !std::isfinite(c.step)) throw UsageError("--step must be positive");
  if (!(c.t_end > 0.0) || !std::isfinite(c.t_end)) throw UsageError("--t-end must be positive");
  if (c.grid_n < 64) throw UsageError("--grid-n must be at least 64");
  if (c.stride < 1) throw UsageError("--stride must be at least 1");
  if (c.orbits < 0) throw UsageError("--orbits must be nonnegative");

  const Format f = resolved_format(c);
  bool ok = true;
  switch (c.command) {
    case Command::Classify:
    case Command::CriticalPoints:
    case Command::Topology: ok = f == Format::Json; break;
    case Command::Simulate: ok = f == Format::Csv || f == Format::Json; break;
    case Command::Project: ok = f == Format::Svg || f == Format::Json; break;
    case Command::Sweep: ok = true; break;
  }
  if (!ok) {
    throw UsageError("format " + std::string(to_string(f)) + " is not available for " +
                     std::string(to_string(c.command)));
  }
}

/// Registers subcommands and flags.  After app.parse(), call finish_parse.
inline void configure(CLI::App& app, RunConfig& c, std::string& sweep_spec) {
  app.require_subcommand(1);
  app.fallthrough();
  auto num = [&](const char* name, double& target, bool& flag, const char* help) {
    app.add_option_function<double>(name, [&target, &flag](const double& v) {
      target = v;
      flag = true;
    }, help);
  };
  num("--b1", c.b1, c.have_b1, "potential/inertia ratio b1 > 0");
  num("--b2", c.b2, c.have_b2, "potential/inertia ratio b2 > 0");
  num("--k1", c.k1, c.have_k1, "integral value k1 >= 0");
  num("--k2", c.k2, c.have_k2, "integral value k2 >= 0");
  app.add_option("--step", c.step, "RK4 step")->capture_default_str();
  app.add_option("--t-end", c.t_end, "integration end time")->capture_default_str();
  app.add_option("--grid-n", c.grid_n, "torus grid resolution")->capture_default_str();
  app.add_option_function<std::string>("--format", [&c](const std::string& s) {
    if (s == "json") c.format = Format::Json;
    else if (s == "csv") c.format = Format::Csv;
    else if (s == "svg") c.format = Format::Svg;
  }, "json | csv | svg")->check(CLI::IsMember({"json", "csv", "svg"}));
  app.add_option("--out", c.out_path, "output file (default: stdout)");
  app.add_option("--seed", c.seed, "seed for random initial conditions")->capture_default_str();
  app.add_option("--sweep", sweep_spec, "k1min:k1max:k2min:k2max:n");
  app.add_option("--stride", c.stride, "simulate: keep every n-th step")->capture_default_str();
  app.add_option("--orbits", c.orbits, "project: number of seeded orbits")->capture_default_str();
  app.add_option("--threads", c.threads, "sweep: worker threads (0 = all cores)")->capture_default_str();

  const std::array<std::pair<Command, const char*>, 6> subs{{
      {Command::Classify, "region of (k1, k2) and the discriminant"},
      {Command::CriticalPoints, "equilibria on S_k with linear type"},
      {Command::Topology, "components and genera of S_k, checked by index sum"},
      {Command::Simulate, "RK4 trajectory from a seeded point of S_k"},
      {Command::Project, "flat torus portrait or orbit report"},
      {Command::Sweep, "region/topology atlas over a k-rectangle"},
  }};
  for (const auto& [cmd, help] : subs) {
    auto* sub = app.add_subcommand(std::string(to_string(cmd)), help);
    sub->parse_complete_callback([&c, cmd = cmd] { c.command = cmd; });
  }
}

inline void finish_parse(RunConfig& c, const std::string& sweep_spec) {
  if (!sweep_spec.empty()) c.sweep = parse_sweep(sweep_spec);
  validate(c);
}

// ---------------------------------------------------------------------------
// Serialization helpers.

inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline Json to_json(const State& s) {
  return Json{{"m1", s.m1}, {"m2", s.m2}, {"gamma1", s.gamma1}, {"gamma2", s.gamma2}, {"gamma3", s.gamma3}};
}

inline Json opt_string(const auto& v) { return v ? Json(std::string(to_string(*v))) : Json(nullptr); }

inline Json header(const RunConfig& c) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = to_string(c.command);
  j["b"] = {{"b1", c.b1}, {"b2", c.b2}};
  if (c.command != Command::Sweep) j["k"] = {{"k1", c.k1}, {"k2", c.k2}};
  return j;
}

inline Json classify_json(const RunConfig& c) {
  const Params b = c.params();
  const LevelValues k = c.levels();
  const Region r = classify_region(b, k);
  Json j = header(c);
  j["region"] = to_string(r.tag);
  j["subregion"] = opt_string(r.subregion);
  j["singular_cause"] = opt_string(r.singular_cause);
  j["delta"] = equal_b(b) ? Json(nullptr) : Json(discriminant(b, k).delta);
  return j;
}

inline Json critical_json(const RunConfig& c) {
  const Params b = c.params();
  const LevelValues k = c.levels();
  const auto points = find_critical_points(b, k);
  Json list = Json::array();
  for (const auto& p : points) {
    const Linearization lin = classify_critical_point(p.state, b, k);
    Json eig = Json::array();
    for (const auto& e : lin.eigen) eig.push_back({{"re", e.real()}, {"im", e.imag()}});
    list.push_back({{"state", to_json(p.state)},
                    {"kind", to_string(p.kind)},
                    {"index", p.index},
                    {"family", to_string(p.family)},
                    {"eigenvalues", eig}});
  }
  Json j = header(c);
  j["region"] = to_string(classify_region(b, k).tag);
  j["count"] = points.size();
  j["euler_ph"] = euler_char_ph(points);
  j["points"] = std::move(list);
  return j;
}

inline Json topology_json(const RunConfig& c) {
  const Params b = c.params();
  const LevelValues k = c.levels();
  const Topology t = topology_via_construction(b, k, c.grid_n);
  const int ph = euler_char_ph(find_critical_points(b, k));
  Json j = header(c);
  j["region"] = to_string(classify_region(b, k).tag);
  j["grid_n"] = c.grid_n;
  j["components"] = t.components;
  j["genus_per_component"] = t.genus_per_component;
  j["euler"] = t.euler;
  j["euler_ph"] = ph;
  j["agree"] = ph == t.euler;
  return j;
}

/// Seeded sample points of S_k: one generator stream per run.
inline std::vector<State> seeded_states(const RunConfig& c, int count) {
  std::mt19937_64 rng(c.seed);
  std::vector<State> out;
  for (int i = 0; i < count; ++i) out.push_back(random_state_on_level(c.params(), c.levels(), rng));
  return out;
}

struct Artifact {
  std::string body;
  std::string companion_body;  // written next to --out, or to the error stream
  std::string companion_suffix;
};

inline Artifact simulate(const RunConfig& c) {
  const Params b = c.params();
  const State s0 = seeded_states(c, 1).front();
  const Trajectory tr = integrate(s0, b, c.step, c.t_end, {c.stride});
  Json drift = header(c);
  drift["seed"] = c.seed;
  drift["step"] = c.step;
  drift["t_end"] = c.t_end;
  drift["samples"] = tr.states.size();
  drift["initial_state"] = to_json(s0);
  drift["drift"] = {{"f1", tr.drift.f1}, {"f2", tr.drift.f2}, {"norm", tr.drift.norm}};

  Artifact a;
  if (resolved_format(c) == Format::Json) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < tr.states.size(); ++i) {
      Json row = to_json(tr.states[i]);
      row["t"] = tr.times[i];
      rows.push_back(std::move(row));
    }
    drift["trajectory"] = std::move(rows);
    a.body = drift.dump(2) + "\n";
    return a;
  }
  std::string& out = a.body;
  out = "t,m1,m2,gamma1,gamma2,gamma3,f1,f2,norm\r\n";
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    const State& s = tr.states[i];
    const Conserved q = conserved_quantities(s, b);
    for (double v : {tr.times[i], s.m1, s.m2, s.gamma1, s.gamma2, s.gamma3, q.f1, q.f2}) {
      out += csv_number(v);
      out += ',';
    }
    out += csv_number(q.norm);
    out += "\r\n";
  }
  a.companion_body = drift.dump(2) + "\n";
  a.companion_suffix = ".drift.json";
  return a;
}

inline Artifact project(const RunConfig& c) {
  const Params b = c.params();
  const LevelValues k = c.levels();
  const std::vector<State> starts = seeded_states(c, c.orbits);
  Artifact a;
  if (resolved_format(c) == Format::Svg) {
    a.body = render_svg(make_torus_scene(b, k, c.grid_n, starts));
    return a;
  }
  const DpmDescription d = dpm(b, k);
  Json j = header(c);
  j["region"] = to_string(classify_region(b, k).tag);
  j["flow_slope"] = flow_slope(b);
  j["dpm"] = {{"shape", to_string(d.shape)}, {"gamma1_bound", d.gamma1_bound}, {"gamma2_bound", d.gamma2_bound}};
  PeriodicityOptions opt;
  opt.step = c.step;
  Json orbits = Json::array();
  for (const State& s : starts) {
    const TorusPoint t = to_torus(s, b, k);
    const PeriodicityVerdict v = detect_periodicity(s, b, k, opt);
    Json o;
    o["initial_state"] = to_json(s);
    o["torus"] = {{"theta1", t.theta1},
                  {"theta2", t.theta2},
                  {"gamma3_sign", t.gamma3_sign == Gamma3Sign::Plus    ? "Plus"
                                  : t.gamma3_sign == Gamma3Sign::Minus ? "Minus"
                                                                       : "Zero"}};
    o["verdict"] = to_string(v.kind);
    o["period"] = v.period ? Json(*v.period) : Json(nullptr);
    o["return_residual"] = v.return_residual ? Json(*v.return_residual) : Json(nullptr);
    o["winding"] = v.winding ? Json{{"p", v.winding->p}, {"q", v.winding->q}} : Json(nullptr);
    Json connected = Json::array();
    for (const auto& cp : v.connected) connected.push_back(to_json(cp.state));
    o["connected_critical"] = std::move(connected);
    orbits.push_back(std::move(o));
  }
  j["orbits"] = std::move(orbits);
  a.body = j.dump(2) + "\n";
  return a;
}

// ---------------------------------------------------------------------------
// Sweep.

struct SweepCell {
  double k1 = 0.0, k2 = 0.0;  // sample point (cell centre)
  Region region;
  std::optional<double> delta;
  int critical_count = 0;
  std::optional<int> euler;
  std::optional<int> euler_ph;
  std::optional<int> components;
};

inline std::vector<SweepCell> run_sweep(const Params& b, const SweepRange& r, int grid_n, unsigned threads) {
  const int n = r.samples;
  const double w = (r.k1_max - r.k1_min) / n, h = (r.k2_max - r.k2_min) / n;
  std::vector<SweepCell> cells(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t idx = next++; idx < cells.size(); idx = next++) {
      const int i = static_cast<int>(idx % static_cast<std::size_t>(n));
      const int j = static_cast<int>(idx / static_cast<std::size_t>(n));
      SweepCell& cell = cells[idx];
      cell.k1 = r.k1_min + (i + 0.5) * w;
      cell.k2 = r.k2_min + (j + 0.5) * h;
      const LevelValues k{cell.k1, cell.k2};
      cell.region = classify_region(b, k);
      if (!equal_b(b)) cell.delta = discriminant_value(b, k);
      if (cell.region.tag == RegionTag::Singular) continue;
      const auto points = find_critical_points(b, k);
      cell.critical_count = static_cast<int>(points.size());
      cell.euler_ph = euler_char_ph(points);
      const Topology t = topology_via_construction(b, k, grid_n);
      cell.euler = t.euler;
      cell.components = t.components;
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(cells.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return cells;
}

inline std::string sweep_svg(const Params& b, const SweepRange& r, const std::vector<SweepCell>& cells) {
  PlaneScene scene;
  scene.b = b;
  scene.k1_min = r.k1_min;
  scene.k1_max = r.k1_max;
  scene.k2_min = r.k2_min;
  scene.k2_max = r.k2_max;
  scene.cell_w = (r.k1_max - r.k1_min) / r.samples;
  scene.cell_h = (r.k2_max - r.k2_min) / r.samples;
  for (const auto& c : cells) {
    scene.cells.push_back({c.k1 - scene.cell_w / 2.0, c.k2 - scene.cell_h / 2.0, c.region});
  }
  return render_svg(scene);
}

inline Artifact sweep(const RunConfig& c) {
  const Params b = c.params();
  const SweepRange& r = *c.sweep;
  const auto cells = run_sweep(b, r, c.grid_n, c.threads);
  Artifact a;
  const Format f = resolved_format(c);
  if (f == Format::Svg) {
    a.body = sweep_svg(b, r, cells);
    return a;
  }
  auto opt_int = [](const std::optional<int>& v) { return v ? Json(*v) : Json(nullptr); };
  if (f == Format::Json) {
    Json j = header(c);
    j["range"] = {{"k1_min", r.k1_min}, {"k1_max", r.k1_max}, {"k2_min", r.k2_min}, {"k2_max", r.k2_max},
                  {"samples", r.samples}};
    j["grid_n"] = c.grid_n;
    Json list = Json::array();
    for (const auto& cell : cells) {
      list.push_back({{"k1", cell.k1},
                      {"k2", cell.k2},
                      {"region", to_string(cell.region.tag)},
                      {"subregion", opt_string(cell.region.subregion)},
                      {"singular_cause", opt_string(cell.region.singular_cause)},
                      {"delta", cell.delta ? Json(*cell.delta) : Json(nullptr)},
                      {"critical_count", cell.critical_count},
                      {"components", opt_int(cell.components)},
                      {"euler", opt_int(cell.euler)},
                      {"euler_ph", opt_int(cell.euler_ph)},
                      {"agree", cell.euler ? Json(*cell.euler == *cell.euler_ph) : Json(nullptr)}});
    }
    j["cells"] = std::move(list);
    a.body = j.dump(2) + "\n";
  } else {
    auto field = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); };
    a.body = "k1,k2,region,subregion,singular_cause,delta,critical_count,components,euler,euler_ph,agree\r\n";
    for (const auto& cell : cells) {
      a.body += csv_number(cell.k1) + "," + csv_number(cell.k2) + "," + std::string(to_string(cell.region.tag)) + "," +
                (cell.region.subregion ? std::string(to_string(*cell.region.subregion)) : "") + "," +
                (cell.region.singular_cause ? std::string(to_string(*cell.region.singular_cause)) : "") + "," +
                (cell.delta ? csv_number(*cell.delta) : "") + "," + std::to_string(cell.critical_count) + "," +
                field(cell.components) + "," + field(cell.euler) + "," + field(cell.euler_ph) + "," +
                (cell.euler ? (*cell.euler == *cell.euler_ph ? "true" : "false") : "") + "\r\n";
    }
  }
  a.companion_body = sweep_svg(b, r, cells);
  a.companion_suffix = ".svg";
  return a;
}

// ---------------------------------------------------------------------------

inline void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidInput, "cannot open " + p.string() + " for writing");
  f << body;
  if (!f) throw Error(ErrorCode::InvalidInput, "failed writing " + p.string());
}

inline std::filesystem::path companion_path(const std::string& out, const std::string& suffix) {
  std::filesystem::path p(out);
  if (suffix == ".svg" && p.replace_extension(".svg") != std::filesystem::path(out)) return p;
  return std::filesystem::path(out + suffix);
}

/// Executes a validated config.  Results go to `out_path` or `out`;
/// diagnostics (and the simulate drift summary without --out) to `err`.
inline int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    validate(c);
    Artifact a;
    switch (c.command) {
      case Command::Classify: a.body = classify_json(c).dump(2) + "\n"; break;
      case Command::CriticalPoints: a.body = critical_json(c).dump(2) + "\n"; break;
      case Command::Topology: a.body = topology_json(c).dump(2) + "\n"; break;
      case Command::Simulate: a = simulate(c); break;
      case Command::Project: a = project(c); break;
      case Command::Sweep: a = sweep(c); break;
    }
    if (c.out_path.empty()) {
      out << a.body;
      if (c.command == Command::Simulate && !a.companion_body.empty()) err << a.companion_body;
    } else {
      write_file(c.out_path, a.body);
      if (!a.companion_body.empty()) write_file(companion_path(c.out_path, a.companion_suffix), a.companion_body);
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}

}  // namespace suslov::cli
