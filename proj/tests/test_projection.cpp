#include <gtest/gtest.h>

#include <random>
#include <set>

#include "suslov/projection.hpp"

using namespace suslov;

namespace {
const Params kB41{4, 1};
}

TEST(ToTorus, Examples) {
  const LevelValues k{1, 0.5};
  const double g2 = std::sqrt(0.5 / 1.0);
  // (m1, gamma1) = (sqrt k1, 0) and (m2, gamma2) = (0, sqrt(k2/b2)).
  const State s{std::sqrt(k.k1), 0.0, 0.0, g2, std::sqrt(1 - g2 * g2)};
  const TorusPoint t = to_torus(s, kB41, k);
  EXPECT_DOUBLE_EQ(t.theta1, 0.0);
  EXPECT_DOUBLE_EQ(t.theta2, 0.0);
  EXPECT_EQ(t.gamma3_sign, Gamma3Sign::Plus);
}

TEST(ToTorus, Errors) {
  const State s{1, 0, 0, 0, 1};
  try {
    to_torus(s, kB41, {0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateEllipse);
  }
  try {
    to_torus(s, kB41, {2, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
  }
}

TEST(FromTorus, Examples) {
  const LevelValues k{1, 0.5};
  const State s = from_torus({0, 0, Gamma3Sign::Minus}, kB41, k);
  EXPECT_DOUBLE_EQ(s.m1, 1.0);
  EXPECT_DOUBLE_EQ(s.m2, 0.0);
  EXPECT_DOUBLE_EQ(s.gamma1, 0.0);
  EXPECT_DOUBLE_EQ(s.gamma2, std::sqrt(0.5));
  EXPECT_NEAR(s.gamma3, -std::sqrt(1 - 0.5), 1e-15);
}

TEST(FromTorus, BoundaryHasZeroGamma3AndOutsideIsRejected) {
  const LevelValues k{4.4, 1.1};
  // A point of the boundary curve along theta2 = pi/2: cos^2 t1 = (eps - y) / x.
  const double x = 1.1, y = 1.1, eps = x + y - 1;
  const double t1 = std::acos(std::sqrt((eps - y) / x));
  const State s = from_torus({t1, kPi / 2, Gamma3Sign::Zero}, kB41, k);
  EXPECT_EQ(s.gamma3, 0.0);
  EXPECT_TRUE(on_level_surface(s, kB41, k, 1e-12));
  try {
    from_torus({kPi / 2, 0.0, Gamma3Sign::Plus}, kB41, k);  // g = 0 < eps
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotInImage);
  }
}

TEST(TorusChart, RoundTrip) {
  std::mt19937_64 rng(61);
  for (const LevelValues k : {LevelValues{1, 0.5}, LevelValues{2, 0.75}, LevelValues{4.4, 1.1}, LevelValues{3.4, 1.2}}) {
    for (int i = 0; i < 2000; ++i) {
      const State s = random_state_on_level(kB41, k, rng);
      const TorusPoint t = to_torus(s, kB41, k);
      ASSERT_GE(t.theta1, -kPi / 2);
      ASSERT_LT(t.theta1, 3 * kPi / 2);
      ASSERT_GE(t.theta2, 0.0);
      ASSERT_LT(t.theta2, kTwoPi);
      const State back = from_torus(t, kB41, k);
      if (t.gamma3_sign != Gamma3Sign::Zero) {
        ASSERT_LE(distance(s, back), 1e-12);
      }
      const TorusPoint again = to_torus(back, kB41, k);
      EXPECT_NEAR(angle_difference(again.theta1, t.theta1), 0.0, 1e-12);
      EXPECT_NEAR(angle_difference(again.theta2, t.theta2), 0.0, 1e-12);
    }
  }
}

TEST(FlowSlope, Values) {
  EXPECT_DOUBLE_EQ(flow_slope(kB41), 0.5);
  EXPECT_DOUBLE_EQ(flow_slope(Params{1, 1}), 1.0);
}

TEST(FlowSlope, MeasuredOnD1Trajectory) {
  const LevelValues k{1, 0.5};
  std::mt19937_64 rng(62);
  for (int rep = 0; rep < 5; ++rep) {
    const State s0 = random_state_on_level(kB41, k, rng);
    const Trajectory tr = integrate(s0, kB41, 1e-3, 5.0, {50});
    // D1: gamma3 never vanishes, so the whole run lies between sign changes.
    double t1 = to_torus(tr.states.front(), kB41, k).theta1, t2 = to_torus(tr.states.front(), kB41, k).theta2;
    double d1 = 0, d2 = 0;
    for (std::size_t i = 1; i < tr.states.size(); ++i) {
      ASSERT_GT(tr.states[i].gamma3 * s0.gamma3, 0.0);
      const TorusPoint t = to_torus(tr.states[i], kB41, k);
      d1 += angle_difference(t.theta1, t1);
      d2 += angle_difference(t.theta2, t2);
      t1 = t.theta1;
      t2 = t.theta2;
    }
    EXPECT_NEAR(d2 / d1, flow_slope(kB41), 1e-6);
  }
}

TEST(TorusChart, TrajectoriesStayInClosureOfU) {
  std::mt19937_64 rng(63);
  for (const LevelValues k : {LevelValues{2, 0.75}, LevelValues{4.4, 1.1}, LevelValues{3.4, 1.2}}) {
    const double eps = gk_data(kB41, k).eps;
    const Trajectory tr = integrate(random_state_on_level(kB41, k, rng), kB41, 1e-3, 30.0, {10});
    for (const State& s : tr.states) {
      const TorusPoint t = to_torus(s, kB41, k);
      EXPECT_GE(g_value(t.theta1, t.theta2, kB41, k), eps - 1e-9);
    }
  }
}

TEST(Dpm, ShapesAndBounds) {
  EXPECT_EQ(dpm(kB41, {1, 0.5}).shape, DpmShape::TwoSquares);
  EXPECT_EQ(dpm(kB41, {2, 0.75}).shape, DpmShape::SphereWithFourHoles);
  EXPECT_EQ(dpm(kB41, {5, 0.5}).shape, DpmShape::BandTheta1);
  EXPECT_EQ(dpm(kB41, {2, 3}).shape, DpmShape::BandTheta2);
  const DpmDescription d5 = dpm(kB41, {4.4, 1.1});
  EXPECT_EQ(d5.shape, DpmShape::FullSphere);
  EXPECT_EQ(d5.gamma1_bound, 1.0);
  EXPECT_EQ(d5.gamma2_bound, 1.0);
  EXPECT_DOUBLE_EQ(dpm(kB41, {1, 0.5}).gamma1_bound, 0.5);
  EXPECT_THROW(dpm(kB41, {4, 0.5}), Error);
}

TEST(DpmMultiplicity, Cases) {
  const LevelValues k{1, 0.5};
  EXPECT_EQ(dpm_multiplicity({0, 0, 1}, kB41, k), 4);
  // m1 = 0 only: gamma1 = 1/2.
  EXPECT_EQ(dpm_multiplicity({0.5, 0, std::sqrt(0.75)}, kB41, k), 2);
  // Corner: gamma1 = 1/2 and gamma2 = sqrt(1/2).
  const double g2 = std::sqrt(0.5);
  EXPECT_EQ(dpm_multiplicity({0.5, g2, std::sqrt(1 - 0.25 - 0.5)}, kB41, k), 1);
  EXPECT_EQ(dpm_multiplicity({1, 0, 0}, kB41, k), 0);
  EXPECT_THROW(dpm_multiplicity({1, 1, 0}, kB41, k), Error);
}

TEST(Chord, D1Unbounded) {
  const Chord c = trace_chord({0.1, 0.2, Gamma3Sign::Plus}, kB41, {1, 0.5});
  EXPECT_FALSE(c.bounded);
}

TEST(Chord, EndpointsOnBoundary) {
  const LevelValues k{2, 3};  // Sub4
  std::mt19937_64 rng(64);
  const double eps = gk_data(kB41, k).eps;
  for (int i = 0; i < 50; ++i) {
    const TorusPoint start = to_torus(random_state_on_level(kB41, k, rng), kB41, k);
    const Chord c = trace_chord(start, kB41, k);
    ASSERT_TRUE(c.bounded);
    EXPECT_LT(c.lambda_minus, 0.0);
    EXPECT_GT(c.lambda_plus, 0.0);
    for (double l : {c.lambda_minus, c.lambda_plus}) {
      const TorusPoint e = c.at(l);
      EXPECT_NEAR(g_value(e.theta1, e.theta2, kB41, k), eps, 1e-11);
    }
    // Interior of the chord stays in U_k.
    for (int s = 1; s < 100; ++s) {
      const double l = c.lambda_minus + (c.lambda_plus - c.lambda_minus) * s / 100.0;
      const TorusPoint p = c.at(l);
      EXPECT_GT(g_value(p.theta1, p.theta2, kB41, k), eps - 1e-12);
    }
  }
}

TEST(Periodicity, EquilibriumVerdict) {
  const Params b{1, 1};
  const LevelValues k{1.5, 1.5};
  for (const auto& p : find_critical_points(b, k)) {
    EXPECT_EQ(detect_periodicity(p.state, b, k).kind, VerdictKind::Equilibrium);
  }
}

TEST(Periodicity, D1RationalIsPeriodicWithWinding) {
  const LevelValues k{1, 0.5};
  std::mt19937_64 rng(65);
  for (int i = 0; i < 5; ++i) {
    const State s = random_state_on_level(kB41, k, rng);
    const PeriodicityVerdict v = detect_periodicity(s, kB41, k);
    ASSERT_EQ(v.kind, VerdictKind::Periodic);
    ASSERT_TRUE(v.winding);
    EXPECT_EQ(v.winding->p, 2);
    EXPECT_EQ(v.winding->q, 1);
    EXPECT_LE(*v.return_residual, 1e-6);
  }
}

TEST(Periodicity, D1IrrationalIsQuasiPeriodic) {
  const Params b{2, 1};
  const LevelValues k{0.5, 0.3};
  std::mt19937_64 rng(66);
  const State s = random_state_on_level(b, k, rng);
  EXPECT_EQ(detect_periodicity(s, b, k).kind, VerdictKind::QuasiPeriodic);
  // No return to 1e-6 within a finite horizon.
  EXPECT_FALSE(measure_period(s, b, 1e-3, 200.0).has_value());
}

TEST(Periodicity, Sub4AllPeriodic) {
  const LevelValues k{2, 3};
  std::mt19937_64 rng(67);
  for (int i = 0; i < 10; ++i) {
    const State s = random_state_on_level(kB41, k, rng);
    const PeriodicityVerdict v = detect_periodicity(s, kB41, k);
    ASSERT_EQ(v.kind, VerdictKind::Periodic);
    EXPECT_GT(*v.period, 0.0);
    EXPECT_LE(*v.return_residual, 1e-6);
  }
}

TEST(Periodicity, ChordThroughSaddleConnects) {
  // Start on the line through a saddle of the Sub12 level, inside U_k.
  const LevelValues k{3.4, 1.2};
  const auto pts = find_critical_points(kB41, k);
  const auto saddle = std::find_if(pts.begin(), pts.end(), [](const auto& p) { return p.kind == CriticalKind::Saddle; });
  ASSERT_NE(saddle, pts.end());
  const TorusPoint c = to_torus(saddle->state, kB41, k);
  const auto d = line_direction(kB41);
  const double eps = gk_data(kB41, k).eps;
  int connected = 0;
  for (double l : {0.05, -0.05}) {
    const TorusPoint t{wrap_theta1(c.theta1 + l * d[0]), wrap_theta2(c.theta2 + l * d[1]), Gamma3Sign::Plus};
    if (g_value(t.theta1, t.theta2, kB41, k) <= eps) continue;
    const PeriodicityVerdict v = detect_periodicity(from_torus(t, kB41, k), kB41, k);
    EXPECT_EQ(v.kind, VerdictKind::ConnectsCritical);
    EXPECT_FALSE(v.connected.empty());
    ++connected;
  }
  EXPECT_GE(connected, 1);
}

TEST(Periodicity, SmallOrbitAroundCenterHasLinearPeriod) {
  const Params b{1, 1};
  const LevelValues k{1.5, 1.5};
  const State c = find_critical_points(b, k).front().state;
  const TorusPoint t = to_torus(c, b, k);
  // Move 1e-3 into U_k along the outward normal of the boundary.
  const double h = 1e-6;
  const double gx = (g_value(t.theta1 + h, t.theta2, b, k) - g_value(t.theta1 - h, t.theta2, b, k)) / (2 * h);
  const double gy = (g_value(t.theta1, t.theta2 + h, b, k) - g_value(t.theta1, t.theta2 - h, b, k)) / (2 * h);
  const double n = std::hypot(gx, gy);
  const State s = from_torus({t.theta1 + 1e-3 * gx / n, t.theta2 + 1e-3 * gy / n, Gamma3Sign::Plus}, b, k);
  const auto v = detect_periodicity(s, b, k);
  ASSERT_EQ(v.kind, VerdictKind::Periodic);
  EXPECT_NEAR(*v.period, kTwoPi, 0.01 * kTwoPi);
}

TEST(RandomState, DeterministicAndOnLevel) {
  std::mt19937_64 a(5), b(5);
  const LevelValues k{3.4, 1.2};
  for (int i = 0; i < 100; ++i) {
    const State s = random_state_on_level(kB41, k, a);
    EXPECT_EQ(s, random_state_on_level(kB41, k, b));
    EXPECT_TRUE(on_level_surface(s, kB41, k, 1e-12));
  }
}
