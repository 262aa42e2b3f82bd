#pragma once

// The moving-shock plant: free traffic on [0, l], congested traffic on [l, L] and
// the Rankine-Hugoniot interface ODE. Two realizations share one state type:
//   * linearized: exact transport along characteristics from the boundary-input
//     histories, interface advanced by RK4;
//   * nonlinear: conservative Godunov finite volumes on lattices that stretch
//     with the interface (fixed node count per side).

#include <optional>
#include <variant>

#include "shockctl/field.hpp"
#include "shockctl/history.hpp"
#include "shockctl/kernels.hpp"
#include "shockctl/traffic_core.hpp"

namespace shockctl {

struct PlantState {
  NodalField free;      // rho on [0, l]
  NodalField congested; // rho on [l, L]
  double shock = 0.0;   // l
  double time = 0.0;
};

enum class ExitSide { upstream, downstream };

/// The interface left the segment (or came within one adjacent cell of its end).
struct DomainExit {
  ExitSide side;
  double time;
};

struct LinearizedCharacteristics {};
struct NonlinearFiniteVolume {
  double cfl = 0.9;
};
using PlantMode = std::variant<LinearizedCharacteristics, NonlinearFiniteVolume>;

struct StepOutcome {
  PlantState state;                // last valid state (unchanged on exit)
  std::optional<DomainExit> exit;
};

/// l-dot = v_max - (v_max / rho_max)(rho_c + rho_f). Equals the Rankine-Hugoniot
/// quotient for Greenshields traffic and stays finite when rho_c == rho_f.
double interface_speed(double rho_free_at_l, double rho_congested_at_l,
                       const FundamentalDiagram& fd);

/// Interface position l, node count per side and time fix the grids; densities are
/// filled by `free_density(x)` and `congested_density(x)`.
template <class FreeFn, class CongestedFn>
PlantState make_state(double shock, double length, std::size_t n_cells, double time,
                      FreeFn&& free_density, CongestedFn&& congested_density) {
  return PlantState{NodalField::sample({0.0, shock}, n_cells, free_density),
                    NodalField::sample({shock, length}, n_cells, congested_density), shock,
                    time};
}

/// Setpoint profile with the interface at l (l need not equal l*).
PlantState equilibrium_state(const Setpoint& sp, double shock, std::size_t n_cells,
                             double time = 0.0);

/// Soft shock used as initial condition: each side deviates from its setpoint by
/// an amplitude-scaled tanh ramp of width `ramp_width` centred on l0. Far from the
/// front the deviation approaches the full amplitude; at the front it is half.
struct InitialProfile {
  double shock = 0.0;
  double amp_free = 0.0;      // veh/m
  double amp_congested = 0.0; // veh/m
  double ramp_width = 20.0;   // m

  double free_deviation(double x) const;
  double congested_deviation(double x) const;
};

PlantState initial_state(const InitialProfile& p, const Setpoint& sp, std::size_t n_cells);

/// Fills both histories with the boundary inputs that would have transported the
/// initial deviations into place: U_in(s) = dev_f(-u s), U_out(s) = dev_c(L + u s)
/// for s in [-L/u - dt, -dt], sampled every dt.
void seed_histories(const InitialProfile& p, const Setpoint& sp, const DerivedParams& params,
                    double dt, InputHistory& in, InputHistory& out);

StepOutcome step_linearized(const PlantState& state, const InputHistory& in,
                            const InputHistory& out, double dt, const DerivedParams& params,
                            const Setpoint& sp, kernels::Exec exec = kernels::Exec::serial);

StepOutcome step_nonlinear(const PlantState& state, double bc_in, double bc_out, double dt,
                           const FundamentalDiagram& fd, double cfl,
                           kernels::Exec exec = kernels::Exec::serial);

/// Linear interpolation in the owning subdomain; x == l reads the free side.
double sample_density(const PlantState& state, double x);

struct InterfacePair {
  double free;
  double congested;
};
InterfacePair sample_interface_pair(const PlantState& state);

/// Trapezoidal vehicle count over [0, l] and [l, L].
double total_vehicles(const PlantState& state);

/// Ok (nullopt) while the interface is inside the segment by at least the wider of
/// the two interface-adjacent cells.
std::optional<DomainExit> check_validity(const PlantState& state);
/// Same rule from the interface position alone (usable when l has already left).
std::optional<DomainExit> check_validity(double shock, double length, std::size_t n_cells,
                                         double time);

double segment_length(const PlantState& state);

} // namespace shockctl
