#include "shockctl/experiment.hpp"

#include <algorithm>
#include <cmath>

#include "shockctl/errors.hpp"

namespace shockctl {

const char* to_string(RunStatus s) {
  switch (s) {
  case RunStatus::completed:
    return "completed";
  case RunStatus::domain_exit:
    return "domain_exit";
  case RunStatus::solver_error:
    return "solver_error";
  }
  return "?";
}

namespace {

void append_event(MetricsRecord& r, const std::string& e) {
  r.events += r.events.empty() ? e : ";" + e;
}

ControlInput policy_input(const Scenario& sc, Policy policy, const PlantState& state,
                          const PlantState& initial, const InputHistory& in,
                          const InputHistory& out, const Setpoint& sp,
                          const ControlGains& gains, const DerivedParams& params) {
  if (policy == Policy::open_loop) {
    return open_loop_controls(initial, sp, state.time);
  }
  if (sc.plant == PlantKind::linearized && sc.quadrature == ControlQuadrature::characteristics) {
    return characteristic_feedback(in, out, state, sp, gains, params);
  }
  return grid_feedback(state, sp, gains, params);
}

void summarize(const Scenario& sc, RunResult& res) {
  RunSummary& s = res.summary;
  const MetricsTrace& tr = res.trace;
  for (const auto& r : tr) {
    s.max_abs_input = std::max({s.max_abs_input, std::abs(r.u_in), std::abs(r.u_out)});
  }
  if (res.status == RunStatus::completed && !tr.empty()) {
    std::size_t k = tr.size();
    while (k > 0 && std::abs(tr[k - 1].x_dev) <= sc.settle_band) {
      --k;
    }
    if (k < tr.size()) {
      s.settle_time = tr[k].t;
    }
  }
  if (!tr.empty() && tr.back().t > 2.0) {
    try {
      s.decay = decay_rate_fit(tr, 2.0, std::min(40.0, tr.back().t));
    } catch (const DomainError&) {
      s.decay.reset();
    }
  }
}

} // namespace

RunResult run(const Scenario& sc, Policy policy, const RunOptions& options) {
  validate(sc);
  const FundamentalDiagram fd = sc.diagram();
  const Setpoint sp = sc.setpoint();
  const DerivedParams params = sc.params();
  const ControlGains gains = sc.gains();
  const LyapunovWeights weights = sc.lambda > 0.0 ? LyapunovWeights(sc.lambda, gains, params)
                                                  : LyapunovWeights::standard(gains, params);
  const SaturationLimits limits{sc.saturation_margin};
  const InitialProfile profile = sc.profile();

  PlantState state = initial_state(profile, sp, sc.n_cells);
  const PlantState initial = state;
  const double lookback = 2.0 * sp.length / params.transport_speed;
  InputHistory in(lookback);
  InputHistory out(lookback);
  seed_histories(profile, sp, params, sc.dt, in, out);

  RunResult res;
  res.policy = policy;
  const std::size_t n_steps = sc.steps();
  res.trace.reserve(n_steps + 1);
  res.actuation.reserve(n_steps + 1);
  std::vector<bool> taken(sc.snapshot_times.size(), false);
  double mass0 = 0.0;
  double net_inflow = 0.0;

  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * sc.dt;
    state.time = t;
    ControlInput input;
    try {
      input = policy_input(sc, policy, state, initial, in, out, sp, gains, params);
    } catch (const ConfigError& e) {
      res.status = RunStatus::solver_error;
      res.error = e.what();
      break;
    }
    input.t = t;
    const AppliedBoundary bnd = apply_boundary(state, input, sp, fd, limits, in, out);
    const TargetState target = forward_transform(state, sp, gains, params);
    res.trace.push_back(
        record_metrics(state, target, bnd.applied, sp, weights, bnd.saturated() ? "saturation" : ""));
    const FluxActuation act = flux_actuation(bnd.applied, sp, fd);
    res.actuation.push_back(act);
    if (bnd.saturated()) {
      ++res.summary.saturated_steps;
    }
    if (sc.plant == PlantKind::nonlinear) {
      const double mass = total_vehicles(state);
      if (k == 0) {
        mass0 = mass;
      }
      res.summary.max_mass_drift =
          std::max(res.summary.max_mass_drift, std::abs(mass - mass0 - net_inflow) / mass0);
    }
    for (std::size_t i = 0; i < taken.size(); ++i) {
      if (!taken[i] && std::abs(sc.snapshot_times[i] - t) <= 0.5 * sc.dt) {
        res.snapshots.push_back({t, state});
        taken[i] = true;
      }
    }
    if (options.keep_trajectory) {
      res.trajectory.push_back({state, bnd.applied});
    }
    if (options.observer) {
      options.observer(StepView{state, target, bnd, in, out});
    }
    if (k == n_steps) {
      break;
    }

    try {
      StepOutcome o = sc.plant == PlantKind::linearized
                          ? step_linearized(state, in, out, sc.dt, params, sp)
                          : step_nonlinear(state, bnd.bc_in, bnd.bc_out, sc.dt, fd, sc.cfl);
      if (o.exit) {
        res.status = RunStatus::domain_exit;
        res.summary.exit_time = o.exit->time;
        res.summary.exit_side = o.exit->side;
        append_event(res.trace.back(), o.exit->side == ExitSide::upstream ? "exit_upstream"
                                                                           : "exit_downstream");
        break;
      }
      net_inflow += sc.dt * (act.q_in - act.q_out);
      state = std::move(o.state);
    } catch (const NumericalError& e) {
      res.status = RunStatus::solver_error;
      res.error = e.what();
      append_event(res.trace.back(), "solver_error");
      break;
    } catch (const ConfigError& e) {
      res.status = RunStatus::solver_error;
      res.error = e.what();
      append_event(res.trace.back(), "solver_error");
      break;
    }
  }
  // Snapshots past the end of a terminated run fall back to the last state.
  if (res.status != RunStatus::completed && !res.trace.empty()) {
    const double last = res.trace.back().t;
    bool pending = false;
    for (std::size_t i = 0; i < taken.size(); ++i) {
      pending = pending || (!taken[i] && sc.snapshot_times[i] > last);
    }
    if (pending) {
      res.snapshots.push_back({last, state});
    }
  }
  summarize(sc, res);
  return res;
}

Comparison compare(const Scenario& scenario, const RunOptions& options) {
  Comparison c;
  validate(scenario);
#pragma omp parallel for schedule(static, 1)
  for (int i = 0; i < 2; ++i) {
    if (i == 0) {
      c.closed_loop = run(scenario, Policy::backstepping, options);
    } else {
      c.open_loop = run(scenario, Policy::open_loop, options);
    }
  }
  return c;
}

std::vector<SweepEntry> sweep(const Scenario& scenario, const std::string& key,
                              const std::vector<double>& values, Policy policy,
                              const RunOptions& options) {
  const auto keys = sweepable_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
    throw ConfigError("'" + key + "' is not sweepable");
  }
  std::vector<SweepEntry> out(values.size());
  const auto n = static_cast<long>(values.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    auto& e = out[static_cast<std::size_t>(i)];
    e.value = values[static_cast<std::size_t>(i)];
    try {
      Scenario s = scenario;
      set_sweep_value(s, key, e.value);
      e.result = run(s, policy, options);
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
  }
  return out;
}

} // namespace shockctl
