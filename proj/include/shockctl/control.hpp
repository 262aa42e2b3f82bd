#pragma once

// Bilateral predictor-feedback boundary control of the shock position.
//
//   U_in  = K_f ( X - (b/u) int_0^l rho~_f - (b/u) int_l^{min(L, 2l)} rho~_c )
//   U_out = K_c ( X - (b/u) int_l^L rho~_c - (b/u) int_{max(0, 2l - L)}^l rho~_f )
//
// The integrals are the amount the interface will still move under the deviations
// already travelling towards it, so K X is applied to the predicted position. The
// min/max bounds reflect the nearer boundary about l; both branches coincide at
// l = L/2.

#include <algorithm>

#include "shockctl/deviation_source.hpp"
#include "shockctl/history.hpp"
#include "shockctl/plant.hpp"
#include "shockctl/traffic_core.hpp"

namespace shockctl {

struct ControlGains {
  double k_free;      // K_f, veh/m^2
  double k_congested; // K_c, veh/m^2
  double a;           // b (K_f + K_c), 1/s
};

ControlGains make_gains(double k_free, double k_congested, const DerivedParams& params);

struct ControlInput {
  double u_in = 0.0;  // inflow density deviation, veh/m
  double u_out = 0.0; // outflow density deviation, veh/m
  double t = 0.0;
};

struct Delays {
  double free;      // D_f = l / u
  double congested; // D_c = (L - l) / u
};

Delays delays(double shock, double length, double transport_speed);

/// Control law evaluated on the deviations as given.
template <DeviationSource S>
ControlInput backstepping_controls(const S& dev, double x_dev, const ControlGains& gains,
                                   const DerivedParams& params, double t) {
  const double l = dev.shock();
  const double L = dev.length();
  const double c = params.coupling / params.transport_speed;
  const double u_in = gains.k_free * (x_dev - c * dev.free_integral(0.0, l) -
                                      c * dev.congested_integral(l, std::min(L, 2.0 * l)));
  const double u_out =
      gains.k_congested * (x_dev - c * dev.congested_integral(l, L) -
                           c * dev.free_integral(std::max(0.0, 2.0 * l - L), l));
  return {u_in, u_out, t};
}

ControlInput backstepping_controls(const PlantState& state, const Setpoint& sp,
                                   const ControlGains& gains, const DerivedParams& params);

/// Inputs (p, q) that reproduce themselves when written into the boundary samples
/// they are computed from: the law is affine in the two boundary values, so three
/// evaluations and a 2x2 solve give the fixed point. `make(p, q)` builds the
/// deviation source with those boundary values.
template <class Make>
ControlInput self_consistent_controls(Make&& make, double x_dev, const ControlGains& gains,
                                      const DerivedParams& params, double t) {
  const ControlInput base = backstepping_controls(make(0.0, 0.0), x_dev, gains, params, t);
  const ControlInput e_in = backstepping_controls(make(1.0, 0.0), x_dev, gains, params, t);
  const ControlInput e_out = backstepping_controls(make(0.0, 1.0), x_dev, gains, params, t);
  const double m11 = 1.0 - (e_in.u_in - base.u_in);
  const double m12 = -(e_out.u_in - base.u_in);
  const double m21 = -(e_in.u_out - base.u_out);
  const double m22 = 1.0 - (e_out.u_out - base.u_out);
  const double det = m11 * m22 - m12 * m21;
  return {(base.u_in * m22 - m12 * base.u_out) / det,
          (m11 * base.u_out - m21 * base.u_in) / det, t};
}

/// Self-consistent law on the plant samples (trapezoidal quadrature).
ControlInput grid_feedback(const PlantState& state, const Setpoint& sp,
                           const ControlGains& gains, const DerivedParams& params);

/// Self-consistent law on the exact characteristic solution (linearized plant).
ControlInput characteristic_feedback(const InputHistory& in, const InputHistory& out,
                                     const PlantState& state, const Setpoint& sp,
                                     const ControlGains& gains, const DerivedParams& params);

/// Uncontrolled boundaries: the demand present at the segment ends at t = 0 keeps
/// arriving. Zero whenever the initial data sit at the setpoint boundary values.
ControlInput open_loop_controls(const PlantState& initial, const Setpoint& sp, double t);

struct SaturationLimits {
  double margin = 1.0e-3; // veh/m kept clear of each regime boundary
};

struct AppliedBoundary {
  double bc_in;
  double bc_out;
  ControlInput applied; // deviations actually imposed (after clamping)
  bool saturated_in = false;
  bool saturated_out = false;
  bool saturated() const { return saturated_in || saturated_out; }
};

/// Clamps the inputs into their regimes, writes the boundary samples of `state`
/// and appends (t, u) to both histories.
AppliedBoundary apply_boundary(PlantState& state, const ControlInput& input, const Setpoint& sp,
                               const FundamentalDiagram& fd, const SaturationLimits& limits,
                               InputHistory& in, InputHistory& out);

/// Boundary densities only, no state or history side effects.
AppliedBoundary clamp_boundary(const ControlInput& input, const Setpoint& sp,
                               const FundamentalDiagram& fd, const SaturationLimits& limits);

struct FluxActuation {
  double q_in;
  double q_out;
};

/// Ramp-metering flows that realize the boundary densities.
FluxActuation flux_actuation(const ControlInput& input, const Setpoint& sp,
                             const FundamentalDiagram& fd);

} // namespace shockctl
