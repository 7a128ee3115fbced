#pragma once

// Equilibria of the Suslov flow on S_k, their linear stability, and the Euler
// characteristic obtained by summing Poincare-Hopf indices.
//
// Every equilibrium has gamma3 = 0 and gamma1 m1 = gamma2 m2.  Squaring and
// eliminating m1, m2 and gamma2 gives a quadratic in u = gamma1^2:
//
//   (b1 - b2) u^2 - (k1 + k2 - 2 b2) u + (k2 - b2) = 0,
//
// which degenerates to a linear equation when b1 = b2.

#include <array>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "suslov/core.hpp"
#include "suslov/dynamics.hpp"
#include "suslov/levelset.hpp"

namespace suslov {

enum class CriticalKind { Saddle, Center, Degenerate };

/// Which root of the quadratic the point came from.
enum class Family { Plus, Minus, EqualB };

inline std::string_view to_string(CriticalKind k) {
  switch (k) {
    case CriticalKind::Saddle: return "Saddle";
    case CriticalKind::Center: return "Center";
    case CriticalKind::Degenerate: return "Degenerate";
  }
  return "?";
}

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::Plus: return "Plus";
    case Family::Minus: return "Minus";
    case Family::EqualB: return "EqualB";
  }
  return "?";
}

inline int index_of(CriticalKind k) {
  switch (k) {
    case CriticalKind::Saddle: return -1;
    case CriticalKind::Center: return 1;
    case CriticalKind::Degenerate: return 0;
  }
  return 0;
}

struct CriticalPoint {
  State state;
  CriticalKind kind = CriticalKind::Degenerate;
  int index = 0;
  Family family = Family::EqualB;
};

struct Discriminant {
  double delta = 0.0;
};

inline Discriminant discriminant(const Params& b, const LevelValues& k, double tau = kTau) {
  if (equal_b(b, tau)) {
    throw Error(ErrorCode::EqualBBranch, "b1 = b2: the equilibrium equation is linear in gamma1^2, no discriminant");
  }
  return {discriminant_value(b, k)};
}

struct Linearization {
  CriticalKind kind = CriticalKind::Degenerate;
  std::array<std::complex<double>, 2> eigen{};
  /// Constant term of the characteristic polynomial lambda^2 + kappa of the flow
  /// in the (gamma2, gamma3) chart: kappa = 2 (m1^2 + m2^2) - (k1 + k2).
  double kappa = 0.0;
};

/// Residual tolerance for accepting a state as an equilibrium on S_k.
inline constexpr double kEquilibriumTolerance = 1e-9;

/// Linear type of an equilibrium on S_k.  kappa > 0 gives a center with
/// eigenvalues +-i sqrt(kappa), kappa < 0 a saddle, |kappa| <= tau a degenerate
/// (non-hyperbolic) point.
inline Linearization classify_critical_point(const State& cp, const Params& b, const LevelValues& k,
                                             double tau = kTau) {
  if (norm(vector_field(cp, b)) > kEquilibriumTolerance || !on_level_surface(cp, b, k, kEquilibriumTolerance)) {
    throw Error(ErrorCode::InvalidInput, "state is not an equilibrium on S_k");
  }
  Linearization lin;
  lin.kappa = 2.0 * (cp.m1 * cp.m1 + cp.m2 * cp.m2) - (k.k1 + k.k2);
  const double window = tau * std::max(1.0, k.k1 + k.k2);
  if (lin.kappa > window) {
    const double w = std::sqrt(lin.kappa);
    lin.kind = CriticalKind::Center;
    lin.eigen = {std::complex<double>{0.0, w}, std::complex<double>{0.0, -w}};
  } else if (lin.kappa < -window) {
    const double w = std::sqrt(-lin.kappa);
    lin.kind = CriticalKind::Saddle;
    lin.eigen = {std::complex<double>{w, 0.0}, std::complex<double>{-w, 0.0}};
  } else {
    lin.kind = CriticalKind::Degenerate;
    lin.eigen = {std::complex<double>{0.0, 0.0}, std::complex<double>{0.0, 0.0}};
  }
  return lin;
}

namespace detail {

/// Emits the eight sign patterns with gamma1 m1 = gamma2 m2 for a root u = gamma1^2,
/// or nothing when the root does not lie on S_k.
inline void emit_root(double u, Family family, const Params& b, const LevelValues& k, double tau,
                      std::vector<CriticalPoint>& out) {
  if (!(u > 0.0 && u < 1.0)) return;
  const double v = 1.0 - u;  // gamma2^2
  const double m1_sq = k.k1 - b.b1 * u;
  const double m2_sq = k.k2 - b.b2 * v;
  if (!(m1_sq > tau * std::max(1.0, k.k1)) || !(m2_sq > tau * std::max(1.0, k.k2))) return;
  const double g1 = std::sqrt(u), g2 = std::sqrt(v);
  const double m1 = std::sqrt(m1_sq), m2 = std::sqrt(m2_sq);
  for (int sg1 : {1, -1}) {
    for (int sg2 : {1, -1}) {
      for (int sm1 : {1, -1}) {
        const int sm2 = sg1 * sm1 * sg2;
        CriticalPoint cp;
        cp.state = State{sm1 * m1, sm2 * m2, sg1 * g1, sg2 * g2, 0.0};
        cp.family = family;
        cp.kind = classify_critical_point(cp.state, b, k, tau).kind;
        cp.index = index_of(cp.kind);
        out.push_back(cp);
      }
    }
  }
}

}  // namespace detail

/// All equilibria on a smooth level surface S_k.
inline std::vector<CriticalPoint> find_critical_points(const Params& b, const LevelValues& k, double tau = kTau) {
  require_valid(b);
  require_valid(k);
  const Region region = classify_region(b, k, tau);
  if (region.tag == RegionTag::Singular) {
    throw Error(ErrorCode::UnsupportedRegion, "S_k is singular (" + std::string(to_string(*region.singular_cause)) + ")");
  }

  std::vector<CriticalPoint> out;
  if (equal_b(b, tau)) {
    const double bb = 0.5 * (b.b1 + b.b2);
    const double denom = k.k1 + k.k2 - 2.0 * bb;
    if (std::abs(denom) <= tau * std::max(1.0, k.k1 + k.k2)) return out;
    detail::emit_root((k.k2 - bb) / denom, Family::EqualB, b, k, tau, out);
    return out;
  }

  const double a = b.b1 - b.b2;
  const double s = k.k1 + k.k2 - 2.0 * b.b2;
  const double c = k.k2 - b.b2;
  double delta = discriminant_value(b, k);
  if (std::abs(delta) <= tau * discriminant_scale(b, k)) delta = 0.0;
  if (delta < 0.0) return out;

  // Plus/Minus follow (s +- sqrt(delta)) / (2a).  The root with the larger
  // numerator magnitude is formed directly, the other from the product c / a.
  const double sq = std::sqrt(delta);
  double plus = 0.0, minus = 0.0;
  if (s >= 0.0) {
    plus = (s + sq) / (2.0 * a);
    minus = plus != 0.0 ? c / (a * plus) : 0.0;
  } else {
    minus = (s - sq) / (2.0 * a);
    plus = minus != 0.0 ? c / (a * minus) : 0.0;
  }
  if (delta == 0.0) {
    detail::emit_root(s / (2.0 * a), Family::Plus, b, k, tau, out);
    return out;
  }
  detail::emit_root(plus, Family::Plus, b, k, tau, out);
  detail::emit_root(minus, Family::Minus, b, k, tau, out);
  return out;
}

/// Sum of Poincare-Hopf indices over a complete list of equilibria.
inline int euler_char_ph(std::span<const CriticalPoint> points) {
  int chi = 0;
  for (const auto& p : points) chi += index_of(p.kind);
  return chi;
}

}  // namespace suslov
