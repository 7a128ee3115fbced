#pragma once

// Suslov vector field, its integrals, and a fixed-step RK4 integrator that
// monitors (but never enforces) conservation.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "suslov/core.hpp"

namespace suslov {

inline constexpr double kDefaultStep = 1e-3;
inline constexpr double kBlowupBound = 1e10;
inline constexpr std::int64_t kDefaultMaxDenominator = 10000;

/// Right-hand side in the order (m1, m2, gamma1, gamma2, gamma3):
///   m1' = -b1 g1 g3,  m2' = b2 g2 g3,  g1' = m1 g3,  g2' = -m2 g3,
///   g3' = g2 m2 - g1 m1.
inline Vec5 vector_field(const State& s, const Params& b) {
  return {
      -b.b1 * s.gamma1 * s.gamma3,
      b.b2 * s.gamma2 * s.gamma3,
      s.m1 * s.gamma3,
      -s.m2 * s.gamma3,
      s.gamma2 * s.m2 - s.gamma1 * s.m1,
  };
}

struct Conserved {
  double f1 = 0.0;
  double f2 = 0.0;
  double norm = 0.0;  // |gamma|^2
};

inline Conserved conserved_quantities(const State& s, const Params& b) {
  return {
      s.m1 * s.m1 + b.b1 * s.gamma1 * s.gamma1,
      s.m2 * s.m2 + b.b2 * s.gamma2 * s.gamma2,
      s.gamma1 * s.gamma1 + s.gamma2 * s.gamma2 + s.gamma3 * s.gamma3,
  };
}

/// |f1 - k1|, |f2 - k2|, |norm - 1| all within tol.
inline bool on_level_surface(const State& s, const Params& b, const LevelValues& k, double tol) {
  const Conserved c = conserved_quantities(s, b);
  return std::abs(c.f1 - k.k1) <= tol * std::max(1.0, k.k1) &&
         std::abs(c.f2 - k.k2) <= tol * std::max(1.0, k.k2) && std::abs(c.norm - 1.0) <= tol;
}

// ---------------------------------------------------------------------------
// Extra integral for commensurate frequencies.

enum class ExtraIntegralKind { ComplexPower };

/// sqrt(b1 / b2) = p / q in lowest terms.
struct ExtraIntegral {
  std::int64_t p = 1;
  std::int64_t q = 1;
  ExtraIntegralKind kind = ExtraIntegralKind::ComplexPower;

  bool operator==(const ExtraIntegral&) const = default;
};

/// Continued-fraction remainder below which the expansion counts as terminated.
inline constexpr double kCfTerminationRemainder = 1e-6;
inline constexpr double kRationalRelTolerance = 1e-10;

/// Expands sqrt(b1/b2) as a continued fraction.  The ratio is declared rational
/// only if the expansion terminates (the fractional remainder drops below
/// kCfTerminationRemainder) at a convergent with q <= max_den that matches the
/// ratio to kRationalRelTolerance.  A close convergent alone is not enough:
/// sqrt(2) has convergents within 1e-10 long before 10^6.
inline std::optional<ExtraIntegral> detect_rational_ratio(const Params& b,
                                                          std::int64_t max_den = kDefaultMaxDenominator) {
  require_valid(b);
  if (max_den < 1) throw Error(ErrorCode::InvalidInput, "max_den must be >= 1");
  const double r = std::sqrt(b.b1 / b.b2);

  // Convergent recurrences p_n = a_n p_{n-1} + p_{n-2}, same for q.
  std::int64_t p_prev = 1, q_prev = 0;
  double a = std::floor(r);
  std::int64_t p = static_cast<std::int64_t>(a), q = 1;
  double frac = r - a;
  for (int iter = 0; iter < 64; ++iter) {
    if (q > max_den) return std::nullopt;
    const double approx = static_cast<double>(p) / static_cast<double>(q);
    if (frac <= kCfTerminationRemainder) {
      if (p > 0 && std::abs(r - approx) <= kRationalRelTolerance * approx) {
        return ExtraIntegral{p, q, ExtraIntegralKind::ComplexPower};
      }
      return std::nullopt;
    }
    const double x = 1.0 / frac;
    a = std::floor(x);
    frac = x - a;
    if (a > static_cast<double>(max_den)) return std::nullopt;
    const auto ai = static_cast<std::int64_t>(a);
    const std::int64_t p_next = ai * p + p_prev;
    const std::int64_t q_next = ai * q + q_prev;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
  }
  return std::nullopt;
}

namespace detail {
inline std::complex<double> ipow(std::complex<double> z, std::int64_t n) {
  std::complex<double> acc{1.0, 0.0};
  while (n > 0) {
    if (n & 1) acc *= z;
    z *= z;
    n >>= 1;
  }
  return acc;
}
}  // namespace detail

/// W = (m1 + i sqrt(b1) g1)^q (sqrt(b2) g2 - i m2)^p.  Both the real and the
/// imaginary part are conserved when sqrt(b1/b2) = p/q.  For p = q = 1 and
/// b1 = b2 = b, Im W = b g1 g2 - m1 m2.
inline std::complex<double> extra_integral_value(const State& s, const Params& b, const ExtraIntegral& e) {
  const std::complex<double> z1{s.m1, std::sqrt(b.b1) * s.gamma1};
  const std::complex<double> z2{std::sqrt(b.b2) * s.gamma2, -s.m2};
  return detail::ipow(z1, e.q) * detail::ipow(z2, e.p);
}

// ---------------------------------------------------------------------------
// Integration.

inline State rk4_step(const State& s, const Params& b, double h) {
  const Vec5 y = s.to_array();
  auto at = [&](const Vec5& base, const Vec5& k, double c) {
    Vec5 r;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = base[i] + c * k[i];
    return State::from_array(r);
  };
  const Vec5 k1 = vector_field(s, b);
  const Vec5 k2 = vector_field(at(y, k1, 0.5 * h), b);
  const Vec5 k3 = vector_field(at(y, k2, 0.5 * h), b);
  const Vec5 k4 = vector_field(at(y, k3, h), b);
  Vec5 out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return State::from_array(out);
}

inline bool within_blowup_bound(const State& s) {
  for (double x : s.to_array()) {
    if (!std::isfinite(x) || std::abs(x) > kBlowupBound) return false;
  }
  return true;
}

struct DriftReport {
  double f1 = 0.0;
  double f2 = 0.0;
  double norm = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  DriftReport drift;
};

struct IntegrateOptions {
  /// Record every n-th step (the final state is always recorded).
  std::size_t sample_every = 1;
};

/// Number of equal-ish steps used to cover [0, t_end] with steps of at most h.
inline std::size_t step_count(double t_end, double h) {
  const double n = std::ceil(t_end / h - 1e-9);
  return static_cast<std::size_t>(std::max(1.0, n));
}

/// Classical fixed-step RK4 from t = 0 to t_end.  Steps have size `step`
/// except the last, which is shortened to land on t_end exactly.  No
/// projection back onto the level surface is applied.
inline Trajectory integrate(const State& s0, const Params& b, double step, double t_end,
                            const IntegrateOptions& options = {}) {
  require_valid(b);
  if (!(step > 0.0) || !std::isfinite(step)) throw Error(ErrorCode::InvalidInput, "step must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw Error(ErrorCode::InvalidInput, "t_end must be positive");
  if (std::abs(conserved_quantities(s0, b).norm - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidInput, "initial state is not on the Poisson sphere");
  }
  if (!within_blowup_bound(s0)) throw IntegrationBlowup(0.0, "initial state is not finite");
  const std::size_t stride = std::max<std::size_t>(1, options.sample_every);

  const std::size_t n = step_count(t_end, step);
  Trajectory traj;
  traj.times.reserve(n / stride + 2);
  traj.states.reserve(n / stride + 2);
  traj.times.push_back(0.0);
  traj.states.push_back(s0);

  const Conserved c0 = conserved_quantities(s0, b);
  State s = s0;
  double t = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double t_next = i == n ? t_end : static_cast<double>(i) * step;
    const State next = rk4_step(s, b, t_next - t);
    if (!within_blowup_bound(next)) {
      throw IntegrationBlowup(t, "integration blew up after t = " + std::to_string(t));
    }
    s = next;
    t = t_next;
    const Conserved c = conserved_quantities(s, b);
    traj.drift.f1 = std::max(traj.drift.f1, std::abs(c.f1 - c0.f1));
    traj.drift.f2 = std::max(traj.drift.f2, std::abs(c.f2 - c0.f2));
    traj.drift.norm = std::max(traj.drift.norm, std::abs(c.norm - c0.norm));
    if (i % stride == 0 || i == n) {
      traj.times.push_back(t);
      traj.states.push_back(s);
    }
  }
  return traj;
}

/// Final state after `duration`, using equal steps no larger than max_step.
inline State flow(const State& s0, const Params& b, double duration, double max_step) {
  if (duration == 0.0) return s0;
  const std::size_t n = step_count(duration, max_step);
  const double h = duration / static_cast<double>(n);
  State s = s0;
  for (std::size_t i = 0; i < n; ++i) {
    s = rk4_step(s, b, h);
    if (!within_blowup_bound(s)) {
      throw IntegrationBlowup(static_cast<double>(i) * h, "integration blew up");
    }
  }
  return s;
}

}  // namespace suslov
