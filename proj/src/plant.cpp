#include "shockctl/plant.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "shockctl/errors.hpp"

namespace shockctl {

namespace {

constexpr int kMaxSubsteps = 100000;

std::optional<DomainExit> exit_check(double shock, double length, std::size_t n_cells,
                                     double time) {
  const double n = static_cast<double>(n_cells);
  // Margin: the wider of the two interface-adjacent cells.
  const double margin = std::max(shock, length - shock) / n;
  if (!(shock > margin)) {
    return DomainExit{ExitSide::upstream, time};
  }
  if (!(shock < length - margin)) {
    return DomainExit{ExitSide::downstream, time};
  }
  return std::nullopt;
}

// Time at which the straight path from l0 to l1 crosses the violated bound.
double crossing_time(double t0, double dt, double l0, double l1, double bound) {
  if (l1 == l0) {
    return t0 + dt;
  }
  const double frac = std::clamp((bound - l0) / (l1 - l0), 0.0, 1.0);
  return t0 + frac * dt;
}

void check_range(std::span<const double> rho, double rho_max, double time) {
  for (double r : rho) {
    if (!(r >= 0.0 && r <= rho_max)) {
      throw NumericalError("solver blow-up: density " + std::to_string(r) +
                           " veh/m left [0, rho_max] at t = " + std::to_string(time) + " s");
    }
  }
}

} // namespace

double interface_speed(double rho_free_at_l, double rho_congested_at_l,
                       const FundamentalDiagram& fd) {
  return fd.v_max() * (1.0 - (rho_congested_at_l + rho_free_at_l) / fd.rho_max());
}

PlantState equilibrium_state(const Setpoint& sp, double shock, std::size_t n_cells,
                             double time) {
  return make_state(
      shock, sp.length, n_cells, time, [&](double) { return sp.rho_free; },
      [&](double) { return sp.rho_congested; });
}

double InitialProfile::free_deviation(double x) const {
  return amp_free * 0.5 * (1.0 - std::tanh((x - shock) / ramp_width));
}

double InitialProfile::congested_deviation(double x) const {
  return amp_congested * 0.5 * (1.0 + std::tanh((x - shock) / ramp_width));
}

PlantState initial_state(const InitialProfile& p, const Setpoint& sp, std::size_t n_cells) {
  if (!(p.shock > 0.0 && p.shock < sp.length)) {
    throw DomainError("initial shock position must lie in (0, L)");
  }
  if (!(p.ramp_width > 0.0)) {
    throw DomainError("ramp width must be positive");
  }
  return make_state(
      p.shock, sp.length, n_cells, 0.0,
      [&](double x) { return sp.rho_free + p.free_deviation(x); },
      [&](double x) { return sp.rho_congested + p.congested_deviation(x); });
}

void seed_histories(const InitialProfile& p, const Setpoint& sp, const DerivedParams& params,
                    double dt, InputHistory& in, InputHistory& out) {
  const double u = params.transport_speed;
  const double lookback = sp.length / u;
  const auto steps = static_cast<long>(std::ceil(lookback / dt)) + 1;
  for (long k = -steps; k <= -1; ++k) {
    const double s = static_cast<double>(k) * dt;
    in.push(s, p.free_deviation(std::clamp(-u * s, 0.0, sp.length)));
    out.push(s, p.congested_deviation(std::clamp(sp.length + u * s, 0.0, sp.length)));
  }
}

StepOutcome step_linearized(const PlantState& state, const InputHistory& in,
                            const InputHistory& out, double dt, const DerivedParams& params,
                            const Setpoint& sp, kernels::Exec exec) {
  const double L = sp.length;
  const double u = params.transport_speed;
  const double b = params.coupling;
  const double t = state.time;
  const double l = state.shock;

  // Linearized interface ODE with the interface densities read off the
  // characteristics that reach l at time tau.
  auto rhs = [&](double tau, double shock) {
    return -b * (in.at(tau - shock / u) + out.at(tau - (L - shock) / u));
  };
  const double k1 = rhs(t, l);
  const double k2 = rhs(t + 0.5 * dt, l + 0.5 * dt * k1);
  const double k3 = rhs(t + 0.5 * dt, l + 0.5 * dt * k2);
  const double k4 = rhs(t + dt, l + dt * k3);
  const double l_new = l + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
  const double t_new = t + dt;

  const std::size_t n = state.free.n_cells();
  if (auto exit = exit_check(l_new, L, n, t_new)) {
    const double bound = exit->side == ExitSide::upstream ? 0.0 : L;
    exit->time = crossing_time(t, dt, l, l_new, bound);
    return {state, exit};
  }

  PlantState next{NodalField::constant({0.0, l_new}, n, 0.0),
                  NodalField::constant({l_new, L}, state.congested.n_cells(), 0.0), l_new,
                  t_new};
  const NodalField& f = next.free;
  const NodalField& c = next.congested;
  kernels::nodal_map(exec, next.free.values(), [&](std::size_t i) {
    return sp.rho_free + in.at(t_new - f.node(i) / u);
  });
  kernels::nodal_map(exec, next.congested.values(), [&](std::size_t i) {
    return sp.rho_congested + out.at(t_new - (L - c.node(i)) / u);
  });
  return {std::move(next), std::nullopt};
}

StepOutcome step_nonlinear(const PlantState& state, double bc_in, double bc_out, double dt,
                           const FundamentalDiagram& fd, double cfl, kernels::Exec exec) {
  if (!(cfl > 0.0 && cfl <= 1.0)) {
    throw ConfigError("cfl must lie in (0, 1]");
  }
  if (!(dt > 0.0)) {
    throw ConfigError("dt must be positive");
  }
  const double L = segment_length(state);
  const std::size_t nf = state.free.n_cells();
  const std::size_t nc = state.congested.n_cells();
  const kernels::MovingFlux flux_fn{fd.v_max(), fd.rho_max()};

  std::vector<double> rf(state.free.values().begin(), state.free.values().end());
  std::vector<double> rc(state.congested.values().begin(), state.congested.values().end());
  rf.front() = bc_in;
  rc.back() = bc_out;
  std::vector<double> rf_new(rf.size());
  std::vector<double> rc_new(rc.size());
  std::vector<double> scratch(std::max(rf.size(), rc.size()));

  double l = state.shock;
  double elapsed = 0.0;
  int substeps = 0;
  while (elapsed < dt) {
    if (++substeps > kMaxSubsteps) {
      throw NumericalError("CFL sub-step cap exceeded at t = " +
                           std::to_string(state.time + elapsed) + " s");
    }
    const double speed = interface_speed(rf.back(), rc.front(), fd);
    double max_wave = 0.0;
    for (double r : rf) {
      max_wave = std::max(max_wave, std::abs(fd.v_max() * (1.0 - 2.0 * r / fd.rho_max())));
    }
    for (double r : rc) {
      max_wave = std::max(max_wave, std::abs(fd.v_max() * (1.0 - 2.0 * r / fd.rho_max())));
    }
    max_wave += std::abs(speed);
    // End cells are half width.
    const double dx_min =
        0.5 * std::min(l / static_cast<double>(nf), (L - l) / static_cast<double>(nc));
    const double dt_cfl = cfl * dx_min / max_wave;
    if (!(dt_cfl > 0.0) || !std::isfinite(dt_cfl)) {
      throw NumericalError("CFL bound degenerate at t = " +
                           std::to_string(state.time + elapsed) + " s");
    }
    const double remaining = dt - elapsed;
    const bool final_substep = remaining <= dt_cfl;
    const double sub = final_substep ? remaining : dt_cfl;
    const double l_new = l + sub * speed;

    if (auto exit = exit_check(l_new, L, std::max(nf, nc), state.time + elapsed + sub)) {
      const double bound = exit->side == ExitSide::upstream ? 0.0 : L;
      exit->time = crossing_time(state.time + elapsed, sub, l, l_new, bound);
      PlantState last{NodalField({0.0, l}, rf), NodalField({l, L}, rc), l,
                      state.time + elapsed};
      return {std::move(last), exit};
    }

    const kernels::SideGeometry free_geom{l / static_cast<double>(nf),
                                          l_new / static_cast<double>(nf),
                                          0.0,
                                          speed,
                                          kernels::End::pinned,
                                          kernels::End::interface};
    const kernels::SideGeometry cong_geom{(L - l) / static_cast<double>(nc),
                                          (L - l_new) / static_cast<double>(nc),
                                          speed,
                                          0.0,
                                          kernels::End::interface,
                                          kernels::End::pinned};
    kernels::ale_godunov_step(exec, rf, rf_new, scratch, flux_fn, free_geom, sub);
    kernels::ale_godunov_step(exec, rc, rc_new, scratch, flux_fn, cong_geom, sub);
    check_range(rf_new, fd.rho_max(), state.time + elapsed + sub);
    check_range(rc_new, fd.rho_max(), state.time + elapsed + sub);
    rf.swap(rf_new);
    rc.swap(rc_new);
    l = l_new;
    elapsed += sub;
    if (final_substep) {
      break;
    }
  }
  PlantState next{NodalField({0.0, l}, std::move(rf)), NodalField({l, L}, std::move(rc)), l,
                  state.time + dt};
  return {std::move(next), std::nullopt};
}

double segment_length(const PlantState& state) { return state.congested.domain().right; }

double sample_density(const PlantState& state, double x) {
  const double L = segment_length(state);
  if (!(x >= 0.0 && x <= L)) {
    throw DomainError("sample position " + std::to_string(x) + " outside [0, L]");
  }
  return x <= state.shock ? state.free.at(x) : state.congested.at(x);
}

InterfacePair sample_interface_pair(const PlantState& state) {
  return {state.free.back(), state.congested.front()};
}

double total_vehicles(const PlantState& state) {
  return state.free.integral(0.0, state.shock) +
         state.congested.integral(state.shock, segment_length(state));
}

std::optional<DomainExit> check_validity(const PlantState& state) {
  return exit_check(state.shock, segment_length(state),
                    std::max(state.free.n_cells(), state.congested.n_cells()), state.time);
}

std::optional<DomainExit> check_validity(double shock, double length, std::size_t n_cells,
                                         double time) {
  return exit_check(shock, length, n_cells, time);
}

} // namespace shockctl
