#include "shockctl/control.hpp"

#include <algorithm>

#include "shockctl/errors.hpp"

namespace shockctl {

ControlGains make_gains(double k_free, double k_congested, const DerivedParams& params) {
  if (!(k_free > 0.0) || !(k_congested > 0.0)) {
    throw ConfigError("control gains must be positive");
  }
  return {k_free, k_congested, params.coupling * (k_free + k_congested)};
}

Delays delays(double shock, double length, double transport_speed) {
  if (!(shock > 0.0 && shock < length)) {
    throw DomainError("delays need 0 < l < L");
  }
  if (!(transport_speed > 0.0)) {
    throw DomainError("delays need u > 0");
  }
  return {shock / transport_speed, (length - shock) / transport_speed};
}

ControlInput backstepping_controls(const PlantState& state, const Setpoint& sp,
                                   const ControlGains& gains, const DerivedParams& params) {
  const GridDeviations dev(state, sp);
  return backstepping_controls(dev, state.shock - sp.shock_position, gains, params,
                               state.time);
}

ControlInput grid_feedback(const PlantState& state, const Setpoint& sp,
                           const ControlGains& gains, const DerivedParams& params) {
  return self_consistent_controls(
      [&](double p, double q) {
        return GridDeviations(state, sp, BoundaryOverride{p, q});
      },
      state.shock - sp.shock_position, gains, params, state.time);
}

ControlInput characteristic_feedback(const InputHistory& in, const InputHistory& out,
                                     const PlantState& state, const Setpoint& sp,
                                     const ControlGains& gains, const DerivedParams& params) {
  return self_consistent_controls(
      [&](double p, double q) {
        return CharacteristicDeviations(in, out, state.time, state.shock, sp.length,
                                        params.transport_speed, BoundaryOverride{p, q});
      },
      state.shock - sp.shock_position, gains, params, state.time);
}

ControlInput open_loop_controls(const PlantState& initial, const Setpoint& sp, double t) {
  return {initial.free.front() - sp.rho_free, initial.congested.back() - sp.rho_congested, t};
}

AppliedBoundary clamp_boundary(const ControlInput& input, const Setpoint& sp,
                               const FundamentalDiagram& fd, const SaturationLimits& limits) {
  const double jump = fd.jump_density();
  const double in_lo = limits.margin;
  const double in_hi = jump - limits.margin;
  const double out_lo = jump + limits.margin;
  const double out_hi = fd.rho_max() - limits.margin;

  AppliedBoundary r{sp.rho_free + input.u_in, sp.rho_congested + input.u_out, input};
  if (r.bc_in < in_lo || r.bc_in > in_hi) {
    r.bc_in = std::clamp(r.bc_in, in_lo, in_hi);
    r.applied.u_in = r.bc_in - sp.rho_free;
    r.saturated_in = true;
  }
  if (r.bc_out < out_lo || r.bc_out > out_hi) {
    r.bc_out = std::clamp(r.bc_out, out_lo, out_hi);
    r.applied.u_out = r.bc_out - sp.rho_congested;
    r.saturated_out = true;
  }
  return r;
}

AppliedBoundary apply_boundary(PlantState& state, const ControlInput& input, const Setpoint& sp,
                               const FundamentalDiagram& fd, const SaturationLimits& limits,
                               InputHistory& in, InputHistory& out) {
  AppliedBoundary r = clamp_boundary(input, sp, fd, limits);
  state.free[0] = r.bc_in;
  state.congested[state.congested.n_cells()] = r.bc_out;
  in.push(input.t, r.applied.u_in);
  out.push(input.t, r.applied.u_out);
  return r;
}

FluxActuation flux_actuation(const ControlInput& input, const Setpoint& sp,
                             const FundamentalDiagram& fd) {
  return {flux(sp.rho_free + input.u_in, fd), flux(sp.rho_congested + input.u_out, fd)};
}

} // namespace shockctl
