#include <doctest.h>

#include <cmath>
#include <vector>

#include "shockctl/diagnostics.hpp"
#include "shockctl/errors.hpp"

using namespace shockctl;

namespace {
const FundamentalDiagram kFd(40.0, 0.16);
const Setpoint kSp = matched_setpoint(0.032, 200.0, 500.0, kFd);
const DerivedParams kP = derived_params(kSp, kFd);
const ControlGains kG = make_gains(2e-4, 2e-4, kP);

TargetState target(double l, double wf, double wc, double x, std::size_t n = 400) {
  TargetState t;
  t.w_free = NodalField::constant({0.0, l}, n, wf);
  t.w_congested = NodalField::constant({l, 500.0}, n, wc);
  t.x_dev = x;
  return t;
}
} // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("lambda guard") {
  const double bound = 4.0 * kP.coupling / (kG.a * kP.transport_speed);
  CHECK(LyapunovWeights::lower_bound(kG, kP) == doctest::Approx(bound));
  CHECK_THROWS_AS(LyapunovWeights(bound, kG, kP), ConfigError);
  CHECK_THROWS_AS(LyapunovWeights(0.5 * bound, kG, kP), ConfigError);
  CHECK(LyapunovWeights::standard(kG, kP).lambda() == doctest::Approx(2.0 * bound));
}

TEST_CASE("Lyapunov functional") {
  const LyapunovWeights w = LyapunovWeights::standard(kG, kP);
  const LyapunovValue zero = lyapunov(target(200.0, 0.0, 0.0, 0.0), w);
  CHECK(zero.v == 0.0);
  const double c = 0.01;
  const LyapunovValue v1 = lyapunov(target(2.0, c, 0.0, 0.0), w);
  CHECK(v1.v1 == doctest::Approx(c * c * (1.0 - std::exp(-2.0))).epsilon(1e-12));
  CHECK(v1.v3 == doctest::Approx(0.0));
  CHECK(v1.v2 == 0.0);
  const LyapunovValue vc = lyapunov(target(200.0, 0.0, c, 0.0), w);
  CHECK(vc.v2 == doctest::Approx(c * c * (1.0 - std::exp(-300.0))).epsilon(1e-12));
  const LyapunovValue vx = lyapunov(target(200.0, 0.0, 0.0, 10.0), w);
  CHECK(vx.v == doctest::Approx(100.0));
  CHECK(vx.v5 == 100.0);
}

TEST_CASE("Lyapunov weight on a linear ramp") {
  // w_f = x on [0, 1]: int e^{-x} x^2 = 2 - 5/e; derivative term int e^{-x} = 1 - 1/e.
  TargetState t = target(1.0, 0.0, 0.0, 0.0, 2000);
  t.w_free = NodalField::sample({0.0, 1.0}, 2000, [](double x) { return x; });
  const LyapunovValue v = lyapunov(t, LyapunovWeights::standard(kG, kP));
  CHECK(v.v1 == doctest::Approx(2.0 - 5.0 / std::exp(1.0)).epsilon(1e-6));
  CHECK(v.v3 == doctest::Approx(1.0 - 1.0 / std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("H1 norm") {
  CHECK(h1_norm(NodalField::constant({0.0, 1.0}, 10, 0.0)) == 0.0);
  CHECK(h1_norm(NodalField::constant({2.0, 6.0}, 10, 3.0)) == doctest::Approx(3.0 * 2.0));
  const double m = 0.7;
  const NodalField ramp = NodalField::sample({0.0, 1.0}, 16, [&](double x) { return m * x; });
  CHECK(h1_norm(ramp) == doctest::Approx(std::sqrt(m * m / 3.0 + m * m)).epsilon(1e-14));
  CHECK_THROWS_AS(h1_norm(NodalField::constant({0.0, 1.0}, 2, 1.0)), DomainError);
}

TEST_CASE("Z metric") {
  CHECK(z_metric(equilibrium_state(kSp, 200.0, 20), kSp) == 0.0);
  // Per-side deviations from a flat setpoint stay zero when only l moves.
  CHECK(z_metric(equilibrium_state(kSp, 210.0, 20), kSp) == doctest::Approx(100.0));
}

TEST_CASE("decay rate fit") {
  std::vector<double> t, v;
  for (int k = 0; k <= 100; ++k) {
    t.push_back(0.5 * k);
    v.push_back(3.0 * std::exp(-0.1 * 0.5 * k));
  }
  const DecayFit f = decay_rate_fit(t, v, 0.0, 50.0);
  CHECK(f.sigma0 == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<double> flat(t.size(), 2.0);
  CHECK(decay_rate_fit(t, flat, 0.0, 50.0).sigma0 == doctest::Approx(0.0));
  v[10] = 0.0;
  CHECK_THROWS_AS(decay_rate_fit(t, v, 0.0, 50.0), DomainError);
}

TEST_CASE("records, audit and validity") {
  const LyapunovWeights w = LyapunovWeights::standard(kG, kP);
  const PlantState s = initial_state(InitialProfile{330.0, 0.016, 0.016, 20.0}, kSp, 100);
  const MetricsRecord r =
      record_metrics(s, forward_transform(s, kSp, kG, kP), {0.001, 0.002, 0.0}, kSp, w);
  CHECK(definition_audit(r, w));
  CHECK(r.x_dev == doctest::Approx(130.0));
  CHECK(r.lyap.v5 == doctest::Approx(130.0 * 130.0));
  MetricsRecord bad = r;
  bad.lyap.v *= 1.0 + 1e-15;
  bad.lyap.v += 1e-12;
  CHECK_FALSE(definition_audit(bad, w));
  CHECK(validity_radius_sq(kSp) == 40000.0);
  CHECK(validity_implication(r, kSp));
  MetricsRecord outside = r;
  outside.x_dev = -250.0; // premise false, implication holds vacuously
  outside.shock = -50.0;
  CHECK(validity_implication(outside, kSp));
}

}
