// Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "shockctl/backstepping.hpp"
#include "shockctl/experiment.hpp"

using namespace shockctl;

namespace {

int failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail) {
  std::printf("%s criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  failures += ok ? 0 : 1;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Scenario defaults() {
  Scenario s;
  s.snapshot_times = {0.0, s.horizon};
  return s;
}

void setpoint_reproduction() {
  const FundamentalDiagram fd(40.0, 160.0 * kPerKm);
  const Setpoint sp = matched_setpoint(32.0 * kPerKm, 200.0, 500.0, fd);
  // Exact in veh/km arithmetic: 160 - 32 and 160 / 2.
  const double rc = std::round(sp.rho_congested / kPerKm * 1e9) / 1e9;
  const double jump = std::round(fd.jump_density() / kPerKm * 1e9) / 1e9;
  report(1, "setpoint reproduction", rc == 128.0 && jump == 80.0,
         fmt("rho_c* = %.12g veh/km, rho_jump = %.12g veh/km", sp.rho_congested / kPerKm,
             fd.jump_density() / kPerKm));
}

struct Hold {
  double max_dev = 0.0;
  double max_u = 0.0;
  bool completed = false;
};

Hold hold_after(const Scenario& s, double t0) {
  const RunResult r = run(s, Policy::backstepping);
  Hold h;
  h.completed = r.status == RunStatus::completed;
  for (const auto& rec : r.trace) {
    if (rec.t >= t0) {
      h.max_dev = std::max(h.max_dev, std::abs(rec.shock - s.shock_star));
      h.max_u = std::max({h.max_u, std::abs(rec.u_in), std::abs(rec.u_out)});
    }
  }
  return h;
}

void closed_loop_convergence() {
  Scenario s = defaults();
  const double u_cap = 0.01 * s.rho_max;
  bool ok = true;
  std::string detail;
  for (PlantKind k : {PlantKind::nonlinear, PlantKind::linearized}) {
    s.plant = k;
    const Hold h = hold_after(s, 60.0);
    ok = ok && h.completed && h.max_dev <= 5.0 && h.max_u <= u_cap;
    detail += std::string(to_string(k)) +
              fmt(": max |l - 200| = %.3e m, max |U| = %.3e veh/m (cap %.1e); ", h.max_dev,
                  h.max_u, u_cap);
  }
  report(2, "closed-loop convergence, t >= 60 s", ok, detail);
}

void open_loop_escape() {
  Scenario s = defaults();
  bool ok = true;
  std::string detail;
  for (PlantKind k : {PlantKind::nonlinear, PlantKind::linearized}) {
    s.plant = k;
    const RunResult r = run(s, Policy::open_loop);
    const bool exit_up = r.status == RunStatus::domain_exit && r.summary.exit_side &&
                         *r.summary.exit_side == ExitSide::upstream &&
                         r.summary.exit_time && *r.summary.exit_time <= s.horizon;
    ok = ok && exit_up;
    detail += std::string(to_string(k)) + ": " + to_string(r.status) +
              (r.summary.exit_time ? fmt(" upstream at %.2f s; ", *r.summary.exit_time) : "; ");
  }
  report(3, "open-loop escape", ok, detail);
}

// Washout: both boundary signals have crossed to the interface, so the t = 0
// initial data no longer enter the transform at the boundaries.
double grid_boundary_residual(std::size_t n) {
  Scenario s = defaults();
  s.plant = PlantKind::linearized;
  s.quadrature = ControlQuadrature::characteristics;
  s.n_cells = n;
  s.horizon = 30.0;
  const double u = s.params().transport_speed;
  double worst = 0.0;
  RunOptions opt;
  opt.observer = [&](const StepView& v) {
    const double t = v.state.time;
    if (u * t > v.state.shock && u * t > s.length - v.state.shock) {
      worst = std::max({worst, std::abs(v.target.w_free.front()),
                        std::abs(v.target.w_congested.back())});
    }
  };
  run(s, Policy::backstepping, opt);
  return worst;
}

void boundary_annihilation() {
  Scenario s = defaults();
  s.plant = PlantKind::linearized;
  s.quadrature = ControlQuadrature::characteristics;
  s.horizon = 30.0;
  const Setpoint sp = s.setpoint();
  const auto params = s.params();
  const auto gains = s.gains();
  double exact = 0.0;
  RunOptions opt;
  opt.observer = [&](const StepView& v) {
    const CharacteristicDeviations dev(v.inflow, v.outflow, v.state.time, v.state.shock,
                                       sp.length, params.transport_speed);
    const double x = v.state.shock - sp.shock_position;
    exact = std::max({exact, std::abs(target_free_at(dev, 0.0, x, gains, params)),
                      std::abs(target_congested_at(dev, sp.length, x, gains, params))});
  };
  run(s, Policy::backstepping, opt);
  const double tol = 1e-10 * s.rho_max;
  const double e200 = grid_boundary_residual(200);
  const double e400 = grid_boundary_residual(400);
  const double ratio = e200 / e400;
  report(4, "target boundary annihilation", exact <= tol && ratio >= 3.5,
         fmt("closed-form max = %.3e (tol %.1e); trapezoid %.3e (n=200) -> %.3e (n=400),"
             "",
             exact, tol, e200, e400) +
             fmt(" ratio %.2f", ratio));
}

void round_trip() {
  const Scenario s = defaults();
  const Setpoint sp = s.setpoint();
  const auto params = s.params();
  const auto gains = s.gains();
  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.1 * sp.length, 0.9 * sp.length);
  const double amp = 0.05 * s.rho_max;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    double a[2][4], ph[2][4];
    for (auto& side : a) {
      for (double& v : side) {
        v = 0.25 * amp * unit(rng);
      }
    }
    for (auto& side : ph) {
      for (double& v : side) {
        v = M_PI * unit(rng);
      }
    }
    auto field = [&](int side) {
      return [&, side](double x) {
        double r = 0.0;
        for (int k = 0; k < 4; ++k) {
          r += a[side][k] * std::sin((k + 1) * M_PI * x / sp.length + ph[side][k]);
        }
        return r;
      };
    };
    const auto f = field(0);
    const auto c = field(1);
    const PlantState st = make_state(
        pos(rng), sp.length, 400, 0.0, [&](double x) { return sp.rho_free + f(x); },
        [&](double x) { return sp.rho_congested + c(x); });
    const PlantDeviations back =
        inverse_transform(forward_transform(st, sp, gains, params), sp, gains, params);
    double scale = 0.0;
    double err = 0.0;
    for (std::size_t i = 0; i < st.free.n_nodes(); ++i) {
      scale = std::max({scale, std::abs(st.free[i] - sp.rho_free),
                        std::abs(st.congested[i] - sp.rho_congested)});
      err = std::max({err, std::abs(st.free[i] - sp.rho_free - back.free[i]),
                      std::abs(st.congested[i] - sp.rho_congested - back.congested[i])});
    }
    worst = std::max(worst, err / scale);
  }
  report(5, "transform round trip", worst <= 1e-8,
         fmt("max relative error over 100 fields on 400 cells = %.3e", worst));
}

void delay_equivalence() {
  Scenario s = defaults();
  s.plant = PlantKind::linearized;
  const Setpoint sp = s.setpoint();
  const double u = s.params().transport_speed;
  // Relative error with a floor well below the signal once it has decayed.
  const double floor = 1e-9 * s.rho_max;
  double worst_f = 0.0;
  double worst_c = 0.0;
  std::size_t steps = 0;
  RunOptions opt;
  opt.observer = [&](const StepView& v) {
    const double t = v.state.time;
    const double l = v.state.shock;
    const double rf = v.state.free.back() - sp.rho_free;
    const double uf = v.inflow.at(t - l / u);
    const double rc = v.state.congested.front() - sp.rho_congested;
    const double uc = v.outflow.at(t - (sp.length - l) / u);
    worst_f = std::max(worst_f, std::abs(rf - uf) / std::max(std::abs(uf), floor));
    worst_c = std::max(worst_c, std::abs(rc - uc) / std::max(std::abs(uc), floor));
    ++steps;
  };
  const RunResult r = run(s, Policy::backstepping, opt);
  report(6, "delay-system equivalence",
         r.status == RunStatus::completed && worst_f <= 1e-6 && worst_c <= 1e-6,
         fmt("max relative mismatch free %.3e, congested %.3e over %.0f steps", worst_f, worst_c,
             static_cast<double>(steps)));
}

void lyapunov_decay() {
  Scenario s = defaults();
  s.plant = PlantKind::linearized;
  s.amplitude_scale = 0.25;
  const RunResult r = run(s, Policy::backstepping);
  std::size_t increases = 0;
  for (std::size_t k = 1; k < r.trace.size(); ++k) {
    if (r.trace[k].t >= 2.0 && r.trace[k].lyap.v > r.trace[k - 1].lyap.v) {
      ++increases;
    }
  }
  const DecayFit fit = decay_rate_fit(r.trace, 2.0, 40.0);
  report(7, "Lyapunov decay at 1/4 amplitude",
         increases == 0 && fit.sigma0 > 0.0 && fit.r_squared > 0.9,
         fmt("%.0f increases after 2 s; sigma0 = %.4f 1/s, r^2 = %.4f", static_cast<double>(increases),
             fit.sigma0, fit.r_squared));
}

void validity_preservation() {
  bool ok = true;
  std::string detail;
  for (PlantKind k : {PlantKind::linearized, PlantKind::nonlinear}) {
    Scenario s = defaults();
    s.plant = k;
    const Setpoint sp = s.setpoint();
    const double radius = validity_radius_sq(sp);
    const auto entries =
        sweep(s, "amplitude_scale", {1.0, 0.5, 0.25, 0.125}, Policy::backstepping);
    detail += std::string(to_string(k)) + ":";
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      if (!e.result || e.result->status != RunStatus::completed) {
        ok = false;
        detail += " run failed;";
        continue;
      }
      double max_x2 = 0.0;
      bool inside = true;
      for (const auto& rec : e.result->trace) {
        max_x2 = std::max(max_x2, rec.x_dev * rec.x_dev);
        inside = inside && rec.shock > 0.0 && rec.shock < sp.length;
      }
      ok = ok && inside && (i < 2 || max_x2 < radius);
      detail += fmt(" x%.3g max X^2 = %.0f", e.value, max_x2) + (inside ? "" : " (left segment)");
    }
    detail += fmt(" (bound %.0f); ", radius);
  }
  report(8, "validity preservation", ok, detail);
}

double fv_error(std::size_t n, const MetricsTrace& reference) {
  Scenario s = defaults();
  s.amplitude_scale = 0.01;
  s.horizon = 60.0;
  s.n_cells = n;
  s.plant = PlantKind::nonlinear;
  const RunResult r = run(s, Policy::open_loop);
  double e = 0.0;
  for (std::size_t k = 0; k < std::min(r.trace.size(), reference.size()); ++k) {
    e = std::max(e, std::abs(r.trace[k].shock - reference[k].shock));
  }
  return e;
}

void numerical_consistency() {
  Scenario ref = defaults();
  ref.amplitude_scale = 0.01;
  ref.horizon = 60.0;
  ref.n_cells = 800;
  ref.plant = PlantKind::linearized;
  const RunResult lin = run(ref, Policy::open_loop);
  const double e100 = fv_error(100, lin.trace);
  const double e200 = fv_error(200, lin.trace);
  const double e400 = fv_error(400, lin.trace);
  const double ratio = e100 / e200;

  Scenario s = defaults();
  s.horizon = 60.0;
  const double drift = run(s, Policy::backstepping).summary.max_mass_drift;
  report(9, "numerical consistency",
         lin.status == RunStatus::completed && ratio >= 1.7 && ratio <= 2.3 && drift <= 1e-3,
         fmt("FV vs characteristics max |dl| %.3e (n=100) -> %.3e (n=200), ratio %.3f; ", e100,
             e200, ratio) +
             fmt("next halving %.3e (n=400), ratio %.3f (not gated); vehicle drift over 60 s %.3e",
                 e400, e200 / e400, drift));
}

} // namespace

int main() {
  setpoint_reproduction();
  closed_loop_convergence();
  open_loop_escape();
  boundary_annihilation();
  round_trip();
  delay_equivalence();
  lyapunov_decay();
  validity_preservation();
  numerical_consistency();
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
