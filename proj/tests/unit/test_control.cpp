#include <doctest.h>

#include "shockctl/control.hpp"

using namespace shockctl;

namespace {
const FundamentalDiagram kFd(40.0, 0.16);
} // namespace

TEST_SUITE("control") {

TEST_CASE("delays") {
  const Delays d = delays(200.0, 500.0, 24.0);
  CHECK(d.free == doctest::Approx(200.0 / 24.0));
  CHECK(d.congested == doctest::Approx(12.5));
  const Delays mid = delays(250.0, 500.0, 24.0);
  CHECK(mid.free == mid.congested);
  CHECK(delays(1e-9, 500.0, 24.0).free == doctest::Approx(0.0));
}

TEST_CASE("gains") {
  const ControlGains g = make_gains(0.01, 0.02, DerivedParams{24.0, 250.0});
  CHECK(g.a == doctest::Approx(250.0 * 0.03));
  CHECK_THROWS(make_gains(0.0, 0.01, DerivedParams{24.0, 250.0}));
}

TEST_CASE("control law closed forms") {
  const Setpoint sp = matched_setpoint(0.032, 190.0, 500.0, kFd);
  const DerivedParams p = derived_params(sp, kFd);
  const ControlGains g = make_gains(0.01, 0.01, p);

  SUBCASE("equilibrium gives zero") {
    const ControlInput u = backstepping_controls(equilibrium_state(sp, 190.0, 50), sp, g, p);
    CHECK(u.u_in == 0.0);
    CHECK(u.u_out == 0.0);
  }
  SUBCASE("X = 10 m with zero fields gives K X") {
    const ControlInput u = backstepping_controls(equilibrium_state(sp, 200.0, 50), sp, g, p);
    CHECK(u.u_in == doctest::Approx(0.1));
    CHECK(u.u_out == doctest::Approx(0.1));
  }
  SUBCASE("constant deviations, l < L/2 branch") {
    const double df = 0.002;
    const double dc = -0.001;
    const PlantState s = make_state(
        200.0, 500.0, 64, 0.0, [&](double) { return sp.rho_free + df; },
        [&](double) { return sp.rho_congested + dc; });
    const double c = p.coupling / p.transport_speed;
    const ControlInput u = backstepping_controls(s, sp, g, p);
    CHECK(u.u_in == doctest::Approx(0.01 * (10.0 - c * (200.0 * df + 200.0 * dc))).epsilon(1e-12));
    CHECK(u.u_out == doctest::Approx(0.01 * (10.0 - c * (300.0 * dc + 200.0 * df))).epsilon(1e-12));
  }
}

TEST_CASE("self-consistent inputs reproduce themselves") {
  const Setpoint sp = matched_setpoint(0.032, 200.0, 500.0, kFd);
  const DerivedParams p = derived_params(sp, kFd);
  const ControlGains g = make_gains(2e-4, 2e-4, p);
  const PlantState s = initial_state(InitialProfile{330.0, 0.016, 0.016, 20.0}, sp, 100);
  const ControlInput u = grid_feedback(s, sp, g, p);
  const GridDeviations dev(s, sp, BoundaryOverride{u.u_in, u.u_out});
  const ControlInput again = backstepping_controls(dev, s.shock - sp.shock_position, g, p, 0.0);
  CHECK(again.u_in == doctest::Approx(u.u_in).epsilon(1e-12));
  CHECK(again.u_out == doctest::Approx(u.u_out).epsilon(1e-12));
}

TEST_CASE("open loop holds the initial boundary deviations") {
  const Setpoint sp = matched_setpoint(0.032, 200.0, 500.0, kFd);
  const ControlInput z = open_loop_controls(equilibrium_state(sp, 300.0, 20), sp, 5.0);
  CHECK(z.u_in == 0.0);
  CHECK(z.u_out == 0.0);
}

TEST_CASE("boundary application, saturation and ramp flows") {
  const Setpoint sp = matched_setpoint(0.032, 200.0, 500.0, kFd);
  const SaturationLimits lim{1e-3};
  SUBCASE("zero input") {
    const AppliedBoundary b = clamp_boundary({0.0, 0.0, 0.0}, sp, kFd, lim);
    CHECK(b.bc_in == sp.rho_free);
    CHECK(b.bc_out == sp.rho_congested);
    CHECK_FALSE(b.saturated());
  }
  SUBCASE("additive inflow") {
    const AppliedBoundary b = clamp_boundary({0.005, 0.0, 0.0}, sp, kFd, lim);
    CHECK(b.bc_in == doctest::Approx(0.037));
  }
  SUBCASE("crossing the jump density saturates") {
    const AppliedBoundary b = clamp_boundary({0.06, -0.06, 0.0}, sp, kFd, lim);
    CHECK(b.saturated_in);
    CHECK(b.saturated_out);
    CHECK(b.bc_in < kFd.jump_density());
    CHECK(b.bc_out > kFd.jump_density());
  }
  SUBCASE("apply_boundary writes state and histories") {
    PlantState s = equilibrium_state(sp, 200.0, 10);
    InputHistory in(50.0), out(50.0);
    const AppliedBoundary b = apply_boundary(s, {0.005, 0.001, 0.0}, sp, kFd, lim, in, out);
    CHECK(s.free.front() == b.bc_in);
    CHECK(s.congested.back() == b.bc_out);
    CHECK(in.newest().value == doctest::Approx(0.005));
    CHECK(out.newest().value == doctest::Approx(0.001));
  }
  SUBCASE("flux actuation") {
    const FluxActuation z = flux_actuation({0.0, 0.0, 0.0}, sp, kFd);
    CHECK(z.q_in == doctest::Approx(flux(sp.rho_free, kFd)));
    CHECK(z.q_out == doctest::Approx(flux(sp.rho_free, kFd)));
    // 0.037 * 40 * (1 - 0.037 / 0.16)
    CHECK(flux_actuation({0.005, 0.0, 0.0}, sp, kFd).q_in == doctest::Approx(1.13775).epsilon(1e-12));
    double prev = -1.0;
    for (double ui = -0.03; ui < 0.047; ui += 0.001) {
      const double q = flux_actuation({ui, 0.0, 0.0}, sp, kFd).q_in;
      CHECK(q > prev);
      prev = q;
    }
  }
}

}
