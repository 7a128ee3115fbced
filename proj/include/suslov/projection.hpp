#pragma once

// Projections of S_k onto the flat torus and onto the Poisson sphere, the
// linear-flow picture on the torus, and detection of periodic orbits.
//
// On S_k the two ellipses m1^2 + b1 g1^2 = k1 and m2^2 + b2 g2^2 = k2 are
// parametrized by
//   m1 = sqrt(k1) cos t1,  g1 = sqrt(k1/b1) sin t1,
//   m2 = sqrt(k2) sin t2,  g2 = sqrt(k2/b2) cos t2,
// and the flow becomes t1' = sqrt(b1) g3, t2' = sqrt(b2) g3: straight lines
// of slope sqrt(b2/b1), traversed back and forth between hits of the boundary
// of U_k (where g3 changes sign).

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "suslov/core.hpp"
#include "suslov/critical.hpp"
#include "suslov/dynamics.hpp"
#include "suslov/levelset.hpp"

namespace suslov {

enum class Gamma3Sign { Plus, Minus, Zero };

struct TorusPoint {
  double theta1 = 0.0;  // [-pi/2, 3pi/2)
  double theta2 = 0.0;  // [0, 2pi)
  Gamma3Sign gamma3_sign = Gamma3Sign::Plus;
};

/// Maps an angle into [lo, lo + 2 pi).
inline double wrap_angle(double a, double lo) {
  double r = std::fmod(a - lo, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return lo + r;
}

inline double wrap_theta1(double a) { return wrap_angle(a, -kPi / 2.0); }
inline double wrap_theta2(double a) { return wrap_angle(a, 0.0); }

/// Signed difference a - b folded into (-pi, pi].
inline double angle_difference(double a, double b) {
  double d = std::fmod(a - b, kTwoPi);
  if (d > kPi) d -= kTwoPi;
  if (d <= -kPi) d += kTwoPi;
  return d;
}

inline constexpr double kOnLevelTolerance = 1e-9;

namespace detail {
inline void require_nondegenerate_ellipses(const LevelValues& k) {
  if (!(k.k1 > 0.0) || !(k.k2 > 0.0)) {
    throw Error(ErrorCode::DegenerateEllipse, "k1 = 0 or k2 = 0: the torus parametrization degenerates");
  }
}
}  // namespace detail

/// gamma3_sign is Zero when the point projects onto the boundary of U_k, i.e.
/// when g_k - eps_k = gamma3^2 is within tau.
inline TorusPoint to_torus(const State& s, const Params& b, const LevelValues& k, double tau = kTau) {
  detail::require_nondegenerate_ellipses(k);
  if (!on_level_surface(s, b, k, kOnLevelTolerance)) {
    throw Error(ErrorCode::InvalidInput, "state does not lie on S_k");
  }
  TorusPoint t;
  t.theta1 = wrap_theta1(std::atan2(s.gamma1 * std::sqrt(b.b1 / k.k1), s.m1 / std::sqrt(k.k1)));
  t.theta2 = wrap_theta2(std::atan2(s.m2 / std::sqrt(k.k2), s.gamma2 * std::sqrt(b.b2 / k.k2)));
  const GkData d = gk_data(b, k);
  const double gap = g_value(t.theta1, t.theta2, b, k) - d.eps;
  if (std::abs(gap) <= tau * std::max(1.0, d.max_level)) {
    t.gamma3_sign = Gamma3Sign::Zero;
  } else {
    t.gamma3_sign = s.gamma3 >= 0.0 ? Gamma3Sign::Plus : Gamma3Sign::Minus;
  }
  return t;
}

inline State from_torus(const TorusPoint& t, const Params& b, const LevelValues& k, double tau = kTau) {
  detail::require_nondegenerate_ellipses(k);
  State s;
  s.m1 = std::sqrt(k.k1) * std::cos(t.theta1);
  s.gamma1 = std::sqrt(k.k1 / b.b1) * std::sin(t.theta1);
  s.m2 = std::sqrt(k.k2) * std::sin(t.theta2);
  s.gamma2 = std::sqrt(k.k2 / b.b2) * std::cos(t.theta2);
  const double rest = 1.0 - s.gamma1 * s.gamma1 - s.gamma2 * s.gamma2;
  if (rest < -tau * std::max(1.0, gk_data(b, k).max_level)) {
    throw Error(ErrorCode::NotInImage, "torus point lies outside the closure of U_k");
  }
  switch (t.gamma3_sign) {
    case Gamma3Sign::Zero: s.gamma3 = 0.0; break;
    case Gamma3Sign::Plus: s.gamma3 = std::sqrt(std::max(rest, 0.0)); break;
    case Gamma3Sign::Minus: s.gamma3 = -std::sqrt(std::max(rest, 0.0)); break;
  }
  return s;
}

/// d theta2 / d theta1 of the projected flow.
inline double flow_slope(const Params& b) { return std::sqrt(b.b2 / b.b1); }

// ---------------------------------------------------------------------------
// Domain of possible motion on the Poisson sphere.

enum class DpmShape { TwoSquares, SphereWithFourHoles, BandTheta1, BandTheta2, FullSphere };

inline std::string_view to_string(DpmShape s) {
  switch (s) {
    case DpmShape::TwoSquares: return "TwoSquares";
    case DpmShape::SphereWithFourHoles: return "SphereWithFourHoles";
    case DpmShape::BandTheta1: return "BandTheta1";
    case DpmShape::BandTheta2: return "BandTheta2";
    case DpmShape::FullSphere: return "FullSphere";
  }
  return "?";
}

struct DpmDescription {
  DpmShape shape = DpmShape::FullSphere;
  double gamma1_bound = 1.0;  // |gamma1| <= min(sqrt(k1/b1), 1)
  double gamma2_bound = 1.0;
};

inline DpmDescription dpm(const Params& b, const LevelValues& k) {
  require_valid(b);
  require_valid(k);
  const Region r = classify_region(b, k);
  DpmDescription d;
  switch (r.tag) {
    case RegionTag::D1: d.shape = DpmShape::TwoSquares; break;
    case RegionTag::D2: d.shape = DpmShape::SphereWithFourHoles; break;
    case RegionTag::D3: d.shape = DpmShape::BandTheta1; break;
    case RegionTag::D4: d.shape = DpmShape::BandTheta2; break;
    case RegionTag::D5: d.shape = DpmShape::FullSphere; break;
    case RegionTag::Singular:
      throw Error(ErrorCode::UnsupportedRegion, "no DPM classification for singular levels");
  }
  d.gamma1_bound = std::min(std::sqrt(k.k1 / b.b1), 1.0);
  d.gamma2_bound = std::min(std::sqrt(k.k2 / b.b2), 1.0);
  return d;
}

/// Number of admissible (m1, m2) over a point of the Poisson sphere.
inline int dpm_multiplicity(const std::array<double, 3>& gamma, const Params& b, const LevelValues& k,
                            double tau = kTau) {
  const double r = std::sqrt(gamma[0] * gamma[0] + gamma[1] * gamma[1] + gamma[2] * gamma[2]);
  if (std::abs(r - 1.0) > kOnLevelTolerance) throw Error(ErrorCode::InvalidInput, "gamma is not a unit vector");
  const double r1 = k.k1 - b.b1 * gamma[0] * gamma[0];
  const double r2 = k.k2 - b.b2 * gamma[1] * gamma[1];
  const double t1 = tau * std::max(1.0, k.k1);
  const double t2 = tau * std::max(1.0, k.k2);
  if (r1 < -t1 || r2 < -t2) return 0;
  const bool z1 = std::abs(r1) <= t1;
  const bool z2 = std::abs(r2) <= t2;
  if (z1 && z2) return 1;
  if (z1 || z2) return 2;
  return 4;
}

// ---------------------------------------------------------------------------
// Chords of the linear flow inside closure(U_k).

/// A maximal segment theta(lambda) = origin + lambda * direction (unit speed)
/// with g_k >= eps_k.  Unbounded when the line never meets the boundary within
/// the search length.
struct Chord {
  double origin_theta1 = 0.0;
  double origin_theta2 = 0.0;
  std::array<double, 2> direction{};
  double lambda_minus = 0.0;
  double lambda_plus = 0.0;
  bool bounded = false;

  TorusPoint at(double lambda) const {
    return {wrap_theta1(origin_theta1 + lambda * direction[0]), wrap_theta2(origin_theta2 + lambda * direction[1]),
            Gamma3Sign::Zero};
  }
};

inline std::array<double, 2> line_direction(const Params& b) {
  const double n = std::sqrt(b.b1 + b.b2);
  return {std::sqrt(b.b1) / n, std::sqrt(b.b2) / n};
}

struct ChordOptions {
  double max_length = kTwoPi * 64.0;
  double min_step = 1e-6;
  double max_step = 0.05;
  double root_tolerance = 1e-13;
};

namespace detail {

class LineProfile {
 public:
  LineProfile(double t1, double t2, const Params& b, const LevelValues& k)
      : t1_(t1), t2_(t2), dir_(line_direction(b)), b_(b), k_(k), eps_(gk_data(b, k).eps) {
    lipschitz_ = std::max(k.k1 / b.b1 + k.k2 / b.b2, 1e-300);
  }

  double operator()(double lambda) const {
    return g_value(t1_ + lambda * dir_[0], t2_ + lambda * dir_[1], b_, k_) - eps_;
  }

  /// First zero of the profile strictly beyond `from` in direction sign,
  /// starting from a point where the profile is h_from > 0.
  std::optional<double> march(double from, double h_from, int sign, const ChordOptions& opt) const {
    double lambda = from, h = h_from;
    while (std::abs(lambda - from) <= opt.max_length) {
      const double step = std::clamp(h / lipschitz_, opt.min_step, opt.max_step);
      const double next = lambda + sign * step;
      const double h_next = (*this)(next);
      if (h_next <= 0.0) return bisect(lambda, next, opt.root_tolerance);
      lambda = next;
      h = h_next;
    }
    return std::nullopt;
  }

  const std::array<double, 2>& direction() const { return dir_; }

 private:
  /// Root between `inside` (profile > 0) and `outside` (profile <= 0).
  double bisect(double inside, double outside, double tol) const {
    for (int i = 0; i < 200 && std::abs(outside - inside) > tol; ++i) {
      const double mid = 0.5 * (inside + outside);
      if ((*this)(mid) > 0.0) {
        inside = mid;
      } else {
        outside = mid;
      }
    }
    return 0.5 * (inside + outside);
  }

  double t1_, t2_;
  std::array<double, 2> dir_;
  Params b_;
  LevelValues k_;
  double eps_;
  double lipschitz_;
};

}  // namespace detail

inline Chord trace_chord(const TorusPoint& start, const Params& b, const LevelValues& k,
                         const ChordOptions& opt = {}) {
  const detail::LineProfile profile(start.theta1, start.theta2, b, k);
  Chord chord;
  chord.origin_theta1 = start.theta1;
  chord.origin_theta2 = start.theta2;
  chord.direction = profile.direction();
  if (gk_data(b, k).eps < 0.0) return chord;  // boundary of U_k is empty

  const double h0 = profile(0.0);
  const double touch = 1e-14 * std::max(1.0, gk_data(b, k).max_level);
  std::optional<double> plus, minus;
  if (h0 > touch) {
    plus = profile.march(0.0, h0, +1, opt);
    minus = profile.march(0.0, h0, -1, opt);
  } else {
    constexpr double nudge = 1e-7;
    const double hp = profile(nudge), hm = profile(-nudge);
    plus = hp > 0.0 ? profile.march(nudge, hp, +1, opt) : std::optional<double>{0.0};
    minus = hm > 0.0 ? profile.march(-nudge, hm, -1, opt) : std::optional<double>{0.0};
  }
  if (plus && minus) {
    chord.bounded = true;
    chord.lambda_plus = *plus;
    chord.lambda_minus = *minus;
  }
  return chord;
}

/// Equilibria whose torus image lies on the closed chord within `tolerance`
/// (perpendicular angular distance).
inline std::vector<CriticalPoint> critical_points_on_chord(const Chord& chord, const Params& b, const LevelValues& k,
                                                           std::span<const CriticalPoint> critical,
                                                           double tolerance) {
  std::vector<CriticalPoint> hits;
  const double d1 = chord.direction[0], d2 = chord.direction[1];
  const double pad = tolerance / d1;
  for (const auto& cp : critical) {
    const TorusPoint c = to_torus(cp.state, b, k);
    // Lifts of c1 met by the segment: origin1 + lambda d1 = c1 + 2 pi a.
    const double lo = chord.origin_theta1 + (chord.lambda_minus - pad) * d1 - c.theta1;
    const double hi = chord.origin_theta1 + (chord.lambda_plus + pad) * d1 - c.theta1;
    for (auto a = static_cast<long>(std::floor(lo / kTwoPi)); a <= static_cast<long>(std::ceil(hi / kTwoPi)); ++a) {
      const double lambda = (c.theta1 + kTwoPi * static_cast<double>(a) - chord.origin_theta1) / d1;
      if (lambda < chord.lambda_minus - pad || lambda > chord.lambda_plus + pad) continue;
      const double gap = angle_difference(chord.origin_theta2 + lambda * d2, c.theta2);
      if (std::abs(gap) * d1 <= tolerance) {
        hits.push_back(cp);
        break;
      }
    }
  }
  return hits;
}

// ---------------------------------------------------------------------------
// Periods.

/// First return time of the orbit through s0 to the hyperplane through s0
/// orthogonal to the flow, accepted once the crossing lies within
/// `return_tolerance` of s0.  Crossings are located inside a step by
/// bisection on the RK4 sub-step length.
inline std::optional<double> measure_period(const State& s0, const Params& b, double step, double horizon,
                                            double return_tolerance = 1e-6) {
  const Vec5 v = vector_field(s0, b);
  const double vn = norm(v);
  if (vn == 0.0) return std::nullopt;
  const Vec5 x0 = s0.to_array();
  auto phase = [&](const State& s) {
    const Vec5 x = s.to_array();
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - x0[i]) * v[i] / vn;
    return acc;
  };

  State s = s0;
  double t = 0.0, phi = 0.0;
  const std::size_t n = step_count(horizon, step);
  for (std::size_t i = 0; i < n; ++i) {
    const State next = rk4_step(s, b, step);
    if (!within_blowup_bound(next)) throw IntegrationBlowup(t, "integration blew up while measuring a period");
    const double phi_next = phase(next);
    if (phi < 0.0 && phi_next >= 0.0) {
      double lo = 0.0, hi = step;
      for (int it = 0; it < 80 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (phase(rk4_step(s, b, mid)) < 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      const double tc = 0.5 * (lo + hi);
      if (distance(rk4_step(s, b, tc), s0) <= return_tolerance) return t + tc;
    }
    s = next;
    phi = phi_next;
    t += step;
  }
  return std::nullopt;
}

/// |flow(s0, period) - s0| integrated with steps of at most `step`.
inline double first_return_residual(const State& s0, const Params& b, double period, double step) {
  return distance(flow(s0, b, period, step), s0);
}

enum class VerdictKind { Periodic, ConnectsCritical, QuasiPeriodic, Equilibrium };

inline std::string_view to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Periodic: return "Periodic";
    case VerdictKind::ConnectsCritical: return "ConnectsCritical";
    case VerdictKind::QuasiPeriodic: return "QuasiPeriodic";
    case VerdictKind::Equilibrium: return "Equilibrium";
  }
  return "?";
}

struct PeriodicityOptions {
  double step = kDefaultStep;
  double horizon = 1000.0;
  double return_tolerance = 1e-6;
  double angular_tolerance = 1e-8;
  std::int64_t max_den = kDefaultMaxDenominator;
  ChordOptions chord;
};

struct PeriodicityVerdict {
  VerdictKind kind = VerdictKind::QuasiPeriodic;
  std::optional<double> period;
  /// Residual of the first return re-integrated at half the step.
  std::optional<double> return_residual;
  /// Torus winding (theta1 turns p, theta2 turns q) when the slope is rational.
  std::optional<ExtraIntegral> winding;
  Chord chord;
  std::vector<CriticalPoint> connected;
};

inline PeriodicityVerdict detect_periodicity(const State& s0, const Params& b, const LevelValues& k,
                                             const PeriodicityOptions& opt = {}) {
  require_valid(b);
  require_valid(k);
  const Region region = classify_region(b, k);
  if (region.tag == RegionTag::Singular) {
    throw Error(ErrorCode::UnsupportedRegion, "periodicity is only decided on smooth level surfaces");
  }
  if (!on_level_surface(s0, b, k, kOnLevelTolerance)) throw Error(ErrorCode::InvalidInput, "s0 does not lie on S_k");

  PeriodicityVerdict verdict;
  if (norm(vector_field(s0, b)) <= 1e-12) {
    verdict.kind = VerdictKind::Equilibrium;
    return verdict;
  }

  auto periodic = [&]() {
    const auto period = measure_period(s0, b, opt.step, opt.horizon, opt.return_tolerance);
    if (!period) {
      throw Error(ErrorCode::NoReturn, "no return to the initial state within t = " + std::to_string(opt.horizon));
    }
    verdict.kind = VerdictKind::Periodic;
    verdict.period = *period;
    verdict.return_residual = first_return_residual(s0, b, *period, 0.5 * opt.step);
  };

  const auto ratio = detect_rational_ratio(b, opt.max_den);
  verdict.winding = ratio;
  verdict.chord = trace_chord(to_torus(s0, b, k), b, k, opt.chord);
  if (!verdict.chord.bounded) {
    // The projected line never meets the boundary: it closes only for a
    // rational slope.
    if (ratio) {
      periodic();
    } else {
      verdict.kind = VerdictKind::QuasiPeriodic;
    }
    return verdict;
  }

  const auto critical = find_critical_points(b, k);
  verdict.connected = critical_points_on_chord(verdict.chord, b, k, critical, opt.angular_tolerance);
  if (!verdict.connected.empty()) {
    verdict.kind = VerdictKind::ConnectsCritical;
    return verdict;
  }
  periodic();
  return verdict;
}

// ---------------------------------------------------------------------------
// Seeded sampling.

/// Uniform double in [0, 1) from the top 53 bits; reproducible across
/// standard libraries, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform torus angles restricted to U_k by rejection, with a random sheet.
inline State random_state_on_level(const Params& b, const LevelValues& k, std::mt19937_64& rng,
                                   int max_attempts = 1000000) {
  detail::require_nondegenerate_ellipses(k);
  const double eps = gk_data(b, k).eps;
  for (int i = 0; i < max_attempts; ++i) {
    const double t1 = -kPi / 2.0 + kTwoPi * uniform01(rng);
    const double t2 = kTwoPi * uniform01(rng);
    const bool upper = (rng() >> 63) != 0;
    if (g_value(t1, t2, b, k) > eps) {
      return from_torus({t1, t2, upper ? Gamma3Sign::Plus : Gamma3Sign::Minus}, b, k);
    }
  }
  throw Error(ErrorCode::InvalidInput, "could not sample a point of U_k");
}

}  // namespace suslov
