#pragma once

// Backstepping change of variables between plant deviations and the target
// system
//
//   w_f(x) = rho~_f(x) - K_f ( X - (b/u) int_x^l rho~_f - (b/u) int_l^{min(L, 2l - x)} rho~_c )
//   w_c(x) = rho~_c(x) - K_c ( X - (b/u) int_l^x rho~_c - (b/u) int_{max(0, 2l - x)}^l rho~_f )
//
// Under the feedback law w_f(0) = w_c(L) = 0 and the interface obeys
// X' = -a X - b (w_f(l) + w_c(l)).

#include <algorithm>
#include <span>
#include <vector>

#include "shockctl/control.hpp"
#include "shockctl/deviation_source.hpp"
#include "shockctl/field.hpp"
#include "shockctl/kernels.hpp"
#include "shockctl/plant.hpp"

namespace shockctl {

struct TargetState {
  NodalField w_free;      // on [0, l]
  NodalField w_congested; // on [l, L]
  double x_dev = 0.0;     // X = l - l*
  double time = 0.0;

  double shock() const { return w_free.domain().right; }
};

template <DeviationSource S>
double target_free_at(const S& dev, double x, double x_dev, const ControlGains& gains,
                      const DerivedParams& params) {
  const double l = dev.shock();
  const double c = params.coupling / params.transport_speed;
  return dev.free_at(x) -
         gains.k_free * (x_dev - c * dev.free_integral(x, l) -
                         c * dev.congested_integral(l, std::min(dev.length(), 2.0 * l - x)));
}

template <DeviationSource S>
double target_congested_at(const S& dev, double x, double x_dev, const ControlGains& gains,
                           const DerivedParams& params) {
  const double l = dev.shock();
  const double c = params.coupling / params.transport_speed;
  return dev.congested_at(x) -
         gains.k_congested * (x_dev - c * dev.congested_integral(l, x) -
                              c * dev.free_integral(std::max(0.0, 2.0 * l - x), l));
}

TargetState forward_transform(const PlantState& state, const Setpoint& sp,
                              const ControlGains& gains, const DerivedParams& params,
                              kernels::Exec exec = kernels::Exec::serial);

struct PlantDeviations {
  NodalField free;      // rho~_f on [0, l]
  NodalField congested; // rho~_c on [l, L]
  double x_dev = 0.0;
};

/// Exact inverse of the discrete forward map: the forward operator is assembled
/// as (I + K (b/u) M) with M the interpolant-integral weights and solved by LU.
PlantDeviations inverse_transform(const TargetState& target, const Setpoint& sp,
                                  const ControlGains& gains, const DerivedParams& params);

/// g = (K_f - K_c) X + w_f(l) - w_c(l).
double g_term(const TargetState& target, const ControlGains& gains);

struct EpsilonPair {
  double eps_free;      // rho~_f(2l - x) for x in [l, L], zero where 2l - x < 0
  double eps_congested; // rho~_c(2l - x) for x in [0, l], zero where 2l - x > L
};

EpsilonPair epsilon_terms(const PlantState& state, double x, const Setpoint& sp);

struct TrajectorySample {
  PlantState state;
  ControlInput input;
};

struct ResidualOptions {
  double t_begin = 0.0;     // skip samples before this time
  double kink_cells = 3.0;  // nodes this many cells from 2l - L or 2l are skipped
};

struct ResidualReport {
  double pde_free = 0.0;           // max |w_f,t + u w_f,x - S_f|
  double pde_congested = 0.0;      // max |w_c,t - u w_c,x - S_c|
  double boundary_free = 0.0;      // max |w_f(0, t)|
  double boundary_congested = 0.0; // max |w_c(L, t)|
  double ode = 0.0;                // max |X' + a X + b (w_f(l) + w_c(l))|
  // Kinks carried by the characteristics give O(1) pointwise stencil errors on
  // O(h) sets, so the integrated norms are the ones that converge.
  double pde_free_l1 = 0.0;      // max_t int |residual_f| dx
  double pde_congested_l1 = 0.0; // max_t int |residual_c| dx
  double ode_l1 = 0.0;           // int |residual_X| dt
  std::size_t samples = 0;
};

/// Finite-difference audit of the target system along a linearized closed-loop
/// trajectory with uniform dt. The source terms are
///   S_f = (K_f b/u) l' (g + 2 eps_c) + K_f b U_out  where 2l - x > L,
///   S_c = (K_c b/u) l' (g - 2 eps_f) + K_c b U_in   where 2l - x < 0;
/// the boundary-input parts come from differentiating the clipped integral bound.
ResidualReport target_residual(std::span<const TrajectorySample> trajectory,
                               const ControlGains& gains, const DerivedParams& params,
                               const Setpoint& sp, const ResidualOptions& options = {});

} // namespace shockctl
