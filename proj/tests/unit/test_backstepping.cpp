#include <doctest.h>

#include <cmath>

#include "shockctl/backstepping.hpp"
#include "shockctl/errors.hpp"

using namespace shockctl;

namespace {
const FundamentalDiagram kFd(40.0, 0.16);
const Setpoint kSp = matched_setpoint(0.032, 190.0, 500.0, kFd);
const DerivedParams kP = derived_params(kSp, kFd);
const ControlGains kG = make_gains(2e-4, 3e-4, kP);

PlantState constant_state(double l, double df, double dc, std::size_t n = 100) {
  return make_state(
      l, kSp.length, n, 0.0, [&](double) { return kSp.rho_free + df; },
      [&](double) { return kSp.rho_congested + dc; });
}
} // namespace

TEST_SUITE("backstepping") {

TEST_CASE("zero deviations map to zero") {
  const TargetState t = forward_transform(equilibrium_state(kSp, 190.0, 40), kSp, kG, kP);
  CHECK(t.x_dev == 0.0);
  for (double v : t.w_free.values()) {
    CHECK(v == 0.0);
  }
  for (double v : t.w_congested.values()) {
    CHECK(v == 0.0);
  }
  const PlantDeviations back = inverse_transform(t, kSp, kG, kP);
  for (double v : back.free.values()) {
    CHECK(v == 0.0);
  }
}

TEST_CASE("constant fields: closed-form value at x = 0 and interface relations") {
  const double df = 0.003;
  const double dc = -0.002;
  const PlantState s = constant_state(200.0, df, dc);
  const TargetState t = forward_transform(s, kSp, kG, kP);
  const double X = 10.0;
  const double c = kP.coupling / kP.transport_speed;
  CHECK(t.w_free.front() ==
        doctest::Approx(df - kG.k_free * (X - c * (200.0 * df + 200.0 * dc))).epsilon(1e-12));
  CHECK(t.w_free.back() == doctest::Approx(df - kG.k_free * X).epsilon(1e-14));
  CHECK(t.w_congested.front() == doctest::Approx(dc - kG.k_congested * X).epsilon(1e-14));
  // w_c(L) = dc - K_c (X - c (300 dc) - c int_0^200 df)
  CHECK(t.w_congested.back() ==
        doctest::Approx(dc - kG.k_congested * (X - c * 300.0 * dc - c * 200.0 * df)).epsilon(1e-12));
}

TEST_CASE("round trip on a smooth field reproduces the plant and the interface relations") {
  const PlantState s = make_state(
      260.0, kSp.length, 200, 0.0,
      [](double x) { return kSp.rho_free + 0.004 * std::sin(0.02 * x); },
      [](double x) { return kSp.rho_congested + 0.003 * std::cos(0.013 * x); });
  const TargetState t = forward_transform(s, kSp, kG, kP);
  const PlantDeviations d = inverse_transform(t, kSp, kG, kP);
  for (std::size_t i = 0; i < d.free.n_nodes(); ++i) {
    CHECK(d.free[i] == doctest::Approx(s.free[i] - kSp.rho_free).epsilon(1e-10));
  }
  for (std::size_t i = 0; i < d.congested.n_nodes(); ++i) {
    CHECK(d.congested[i] == doctest::Approx(s.congested[i] - kSp.rho_congested).epsilon(1e-10));
  }
  CHECK(d.x_dev == t.x_dev);
}

TEST_CASE("serial and parallel transforms agree bit for bit") {
  const PlantState s = make_state(
      260.0, kSp.length, 4096, 0.0,
      [](double x) { return kSp.rho_free + 0.004 * std::sin(0.02 * x); },
      [](double x) { return kSp.rho_congested + 0.003 * std::cos(0.013 * x); });
  const TargetState a = forward_transform(s, kSp, kG, kP, kernels::Exec::serial);
  const TargetState b = forward_transform(s, kSp, kG, kP, kernels::Exec::parallel);
  CHECK(std::equal(a.w_free.values().begin(), a.w_free.values().end(), b.w_free.values().begin()));
  CHECK(std::equal(a.w_congested.values().begin(), a.w_congested.values().end(),
                   b.w_congested.values().begin()));
}

TEST_CASE("g term") {
  const ControlGains g{0.02, 0.01, 0.0};
  TargetState t;
  t.w_free = NodalField::constant({0.0, 200.0}, 4, 0.003);
  t.w_congested = NodalField::constant({200.0, 500.0}, 4, 0.001);
  t.x_dev = 10.0;
  CHECK(g_term(t, g) == doctest::Approx(0.102).epsilon(1e-14));
  const ControlGains same{0.01, 0.01, 0.0};
  t.w_congested = NodalField::constant({200.0, 500.0}, 4, 0.003);
  CHECK(g_term(t, same) == 0.0);
}

TEST_CASE("epsilon terms") {
  const PlantState s = make_state(
      200.0, 500.0, 100, 0.0, [](double x) { return kSp.rho_free + 1e-5 * x; },
      [](double x) { return kSp.rho_congested - 1e-5 * x; });
  const EpsilonPair at_l = epsilon_terms(s, 200.0, kSp);
  CHECK(at_l.eps_free == doctest::Approx(1e-5 * 200.0));
  CHECK(at_l.eps_congested == doctest::Approx(-1e-5 * 200.0));
  CHECK(epsilon_terms(s, 50.0, kSp).eps_congested == doctest::Approx(-1e-5 * 350.0));
  const PlantState s100 = constant_state(100.0, 0.001, 0.001);
  CHECK(epsilon_terms(s100, 350.0, kSp).eps_free == 0.0);
}

TEST_CASE("residual audit") {
  const double dt = 0.01;
  SUBCASE("equilibrium trajectory has zero residuals") {
    std::vector<TrajectorySample> traj;
    for (int k = 0; k < 5; ++k) {
      traj.push_back({equilibrium_state(kSp, kSp.shock_position, 50, k * dt), {0.0, 0.0, k * dt}});
    }
    const ResidualReport r = target_residual(traj, kG, kP, kSp);
    CHECK(r.pde_free == 0.0);
    CHECK(r.pde_congested == 0.0);
    CHECK(r.boundary_free == 0.0);
    CHECK(r.boundary_congested == 0.0);
    CHECK(r.ode == 0.0);
  }
  SUBCASE("ODE residual matches a hand difference") {
    // X = 10 + 2 t with zero deviations: X' + a X + b (w_f(l) + w_c(l)) = 2.
    std::vector<TrajectorySample> traj;
    for (int k = 0; k < 3; ++k) {
      const double t = k * dt;
      traj.push_back({equilibrium_state(kSp, kSp.shock_position + 10.0 + 2.0 * t, 50, t),
                      {0.0, 0.0, t}});
    }
    const ResidualReport r = target_residual(traj, kG, kP, kSp);
    CHECK(r.ode == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("too short") {
    std::vector<TrajectorySample> traj(2, {equilibrium_state(kSp, 190.0, 10), {}});
    CHECK_THROWS_AS(target_residual(traj, kG, kP, kSp), DomainError);
  }
}

}
