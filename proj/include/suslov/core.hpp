#pragma once

// Domain types for the reduced Suslov flow with a Klebsh-Tisserand potential.
//
// The reduced phase space is R^5 with coordinates (m1, m2, gamma1, gamma2,
// gamma3), restricted to the Poisson sphere |gamma| = 1.  A system is fixed by
// the potential/inertia ratios b = (b1, b2); a level surface S_k by the values
// k = (k1, k2) of the two quadratic integrals.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace suslov {

/// Relative tolerance used for every comparison against a bifurcation boundary.
inline constexpr double kTau = 1e-12;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class ErrorCode {
  InvalidInput,
  UnsupportedRegion,
  EqualBBranch,
  IntegrationBlowup,
  DegenerateEllipse,
  NotInImage,
  NoReturn,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Thrown by the integrator when the state leaves the finite/bounded domain.
class IntegrationBlowup : public Error {
 public:
  IntegrationBlowup(double last_valid_time, const std::string& what)
      : Error(ErrorCode::IntegrationBlowup, what), last_valid_time_(last_valid_time) {}

  double last_valid_time() const noexcept { return last_valid_time_; }

 private:
  double last_valid_time_;
};

struct Params {
  double b1 = 1.0;
  double b2 = 1.0;

  bool operator==(const Params&) const = default;
};

struct LevelValues {
  double k1 = 0.0;
  double k2 = 0.0;

  bool operator==(const LevelValues&) const = default;
};

using Vec5 = std::array<double, 5>;

struct State {
  double m1 = 0.0;
  double m2 = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma3 = 1.0;

  Vec5 to_array() const { return {m1, m2, gamma1, gamma2, gamma3}; }
  static State from_array(const Vec5& v) { return {v[0], v[1], v[2], v[3], v[4]}; }

  bool operator==(const State&) const = default;
};

inline double distance(const State& a, const State& b) {
  const Vec5 x = a.to_array();
  const Vec5 y = b.to_array();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(s);
}

inline double norm(const Vec5& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline bool is_valid(const Params& b) {
  return std::isfinite(b.b1) && std::isfinite(b.b2) && b.b1 > 0.0 && b.b2 > 0.0;
}

inline bool is_valid(const LevelValues& k) {
  return std::isfinite(k.k1) && std::isfinite(k.k2) && k.k1 >= 0.0 && k.k2 >= 0.0;
}

inline void require_valid(const Params& b) {
  if (!is_valid(b)) throw Error(ErrorCode::InvalidInput, "b1 and b2 must be finite and positive");
}

inline void require_valid(const LevelValues& k) {
  if (!is_valid(k)) throw Error(ErrorCode::InvalidInput, "k1 and k2 must be finite and nonnegative");
}

struct PhysicalParams {
  double I1 = 1.0;
  double I2 = 1.0;
  double B1 = 0.0;
  double B2 = 0.0;
  double Pi1 = 0.0;
  double Pi2 = 0.0;
  double K1 = 0.0;
  double K2 = 0.0;
};

struct ReducedCoordinates {
  Params params;
  LevelValues levels;
  double m1 = 0.0;
  double m2 = 0.0;
};

/// Rescales the physical problem by the principal inertias.  Note the index
/// crossing: m1 and b1, k1 are scaled by I2, while m2 and b2, k2 use I1.  The
/// result is not validated as Params/LevelValues; zero potentials pass through.
inline ReducedCoordinates from_physical(const PhysicalParams& p) {
  if (!(std::isfinite(p.I1) && std::isfinite(p.I2)) || p.I1 <= 0.0 || p.I2 <= 0.0) {
    throw Error(ErrorCode::InvalidInput, "principal inertias I1, I2 must be positive");
  }
  ReducedCoordinates r;
  r.m1 = -p.Pi2 / p.I2;
  r.params.b1 = p.B1 / p.I2;
  r.levels.k1 = p.K1 / p.I2;
  r.m2 = -p.Pi1 / p.I1;
  r.params.b2 = p.B2 / p.I1;
  r.levels.k2 = p.K2 / p.I1;
  return r;
}

/// Inverse of the momentum part of from_physical: returns (Pi1, Pi2).
inline std::array<double, 2> momenta_from_reduced(double m1, double m2, double I1, double I2) {
  return {-m2 * I1, -m1 * I2};
}

// ---------------------------------------------------------------------------
// Regions of the (k1, k2) quadrant.

enum class RegionTag { D1, D2, D3, D4, D5, Singular };

/// Subdivision of D4 (b1 > b2) or D3 (b1 < b2) by the discriminant curve and
/// the line k1 + k2 = 2 max(b1, b2).
enum class Subregion { Sub12, Sub3, Sub4, C1, C2 };

enum class SingularCause { KZero, K1EqB1, K2EqB2, RatioSumOne };

struct Region {
  RegionTag tag = RegionTag::Singular;
  std::optional<Subregion> subregion;
  std::optional<SingularCause> singular_cause;

  bool operator==(const Region&) const = default;
};

inline std::string_view to_string(RegionTag t) {
  switch (t) {
    case RegionTag::D1: return "D1";
    case RegionTag::D2: return "D2";
    case RegionTag::D3: return "D3";
    case RegionTag::D4: return "D4";
    case RegionTag::D5: return "D5";
    case RegionTag::Singular: return "Singular";
  }
  return "?";
}

inline std::string_view to_string(Subregion s) {
  switch (s) {
    case Subregion::Sub12: return "Sub12";
    case Subregion::Sub3: return "Sub3";
    case Subregion::Sub4: return "Sub4";
    case Subregion::C1: return "C1";
    case Subregion::C2: return "C2";
  }
  return "?";
}

inline std::string_view to_string(SingularCause c) {
  switch (c) {
    case SingularCause::KZero: return "KZero";
    case SingularCause::K1EqB1: return "K1EqB1";
    case SingularCause::K2EqB2: return "K2EqB2";
    case SingularCause::RatioSumOne: return "RatioSumOne";
  }
  return "?";
}

/// True when the equal-frequency branch applies: |b1 - b2| <= tau * max(b1, b2).
inline bool equal_b(const Params& b, double tau = kTau) {
  return std::abs(b.b1 - b.b2) <= tau * std::max(b.b1, b.b2);
}

/// Discriminant of the quadratic in gamma1^2 whose roots locate the equilibria,
///   (k1 + k2 - 2 b2)^2 - 4 (b1 - b2)(k2 - b2),
/// evaluated with the indices swapped when b1 < b2.  The two orderings agree in
/// exact arithmetic.  No equal-b guard here; see critical.hpp.
inline double discriminant_value(const Params& b, const LevelValues& k) {
  double lo = b.b2, hi = b.b1, k_lo = k.k2;
  if (b.b1 < b.b2) {
    lo = b.b1;
    hi = b.b2;
    k_lo = k.k1;
  }
  const double s = k.k1 + k.k2 - 2.0 * lo;
  return s * s - 4.0 * (hi - lo) * (k_lo - lo);
}

/// Scale against which |discriminant| is compared when deciding Delta = 0.
inline double discriminant_scale(const Params& b, const LevelValues& k) {
  const double lo = std::min(b.b1, b.b2);
  const double k_lo = b.b1 < b.b2 ? k.k1 : k.k2;
  const double s = k.k1 + k.k2 - 2.0 * lo;
  return std::max({s * s, 4.0 * std::abs(b.b1 - b.b2) * std::abs(k_lo - lo), 1e-300});
}

}  // namespace suslov
