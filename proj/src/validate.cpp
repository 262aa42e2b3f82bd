#include "shockctl/validate.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "shockctl/backstepping.hpp"
#include "shockctl/diagnostics.hpp"
#include "shockctl/errors.hpp"
#include "shockctl/experiment.hpp"
#include "shockctl/output.hpp"
#include "shockctl/scenario.hpp"

namespace shockctl {

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

/// Sum of four random sine modes on [0, L]; max amplitude `amp`.
struct SmoothField {
  double a[4], k[4], phase[4];
  double operator()(double x) const {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
      s += a[i] * std::sin(k[i] * x + phase[i]);
    }
    return s;
  }
};

SmoothField random_field(std::mt19937_64& rng, double amp, double length) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
  SmoothField f{};
  for (int i = 0; i < 4; ++i) {
    f.a[i] = 0.25 * amp * u(rng);
    f.k[i] = (i + 1) * M_PI / length;
    f.phase[i] = ph(rng);
  }
  return f;
}

PlantState state_from(const Setpoint& sp, double shock, std::size_t n,
                      const std::function<double(double)>& dev_free,
                      const std::function<double(double)>& dev_cong) {
  return make_state(
      shock, sp.length, n, 0.0, [&](double x) { return sp.rho_free + dev_free(x); },
      [&](double x) { return sp.rho_congested + dev_cong(x); });
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) {
    m = std::max(m, std::abs(v));
  }
  return m;
}

Scenario base_scenario() {
  Scenario s;
  s.snapshot_times = {0.0, s.horizon};
  return s;
}

// ---- traffic_core ----------------------------------------------------------

Outcome flux_symmetry(std::mt19937_64& rng) {
  const FundamentalDiagram fd(40.0, 0.16);
  std::uniform_real_distribution<double> r(0.0, fd.rho_max());
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double rho = r(rng);
    worst = std::max(worst, std::abs(flux(rho, fd) - flux(fd.rho_max() - rho, fd)));
  }
  const double tol = 1e-14 * fd.v_max() * fd.rho_max();
  return {worst <= tol, "max |Q(rho) - Q(rho_m - rho)| = " + sci(worst)};
}

Outcome speed_antisymmetry(std::mt19937_64& rng) {
  const FundamentalDiagram fd(40.0, 0.16);
  std::uniform_real_distribution<double> r(1e-6, fd.jump_density() - 1e-6);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Setpoint sp = matched_setpoint(r(rng), 200.0, 500.0, fd);
    worst = std::max(worst, std::abs(characteristic_speed(sp.rho_free, fd) +
                                     characteristic_speed(sp.rho_congested, fd)));
  }
  return {worst <= 1e-13 * fd.v_max(), "max |Q'(rho_f*) + Q'(rho_c*)| = " + sci(worst)};
}

Outcome setpoint_invariants(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(1e-6, 1.0 - 1e-6);
  int failures = 0;
  double worst_flux = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const FundamentalDiagram fd(10.0 + 50.0 * unit(rng), 0.05 + 0.2 * unit(rng));
    const double length = 100.0 + 900.0 * unit(rng);
    try {
      const Setpoint sp =
          matched_setpoint(unit(rng) * fd.jump_density(), unit(rng) * length, length, fd);
      validate(sp, fd);
      worst_flux = std::max(worst_flux, std::abs(flux(sp.rho_free, fd) - flux(sp.rho_congested, fd)) /
                                            (fd.v_max() * fd.rho_max()));
    } catch (const std::exception&) {
      ++failures;
    }
  }
  return {failures == 0 && worst_flux <= 1e-14,
          std::to_string(failures) + " rejected, max relative flux mismatch " + sci(worst_flux)};
}

Outcome derivative_exact(std::mt19937_64& rng) {
  const FundamentalDiagram fd(40.0, 0.16);
  std::uniform_real_distribution<double> r(0.01, 0.15);
  const double h = 1e-4;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double rho = r(rng);
    const double fdiff = (flux(rho + h, fd) - flux(rho - h, fd)) / (2.0 * h);
    worst = std::max(worst, std::abs(characteristic_speed(rho, fd) - fdiff));
  }
  // The quadratic has no truncation error; only cancellation (~eps Q / h) remains.
  return {worst <= 1e-9, "max |Q' - central difference| = " + sci(worst)};
}

// ---- plant -----------------------------------------------------------------

Outcome equilibrium_fixed_point(std::mt19937_64&) {
  Scenario s = base_scenario();
  s.shock0 = s.shock_star;
  s.amp_free = s.amp_congested = 0.0;
  s.horizon = 10.0; // 1000 steps
  s.n_cells = 50;
  double worst = 0.0;
  for (PlantKind k : {PlantKind::linearized, PlantKind::nonlinear}) {
    s.plant = k;
    RunOptions opt;
    const Setpoint sp = s.setpoint();
    opt.observer = [&](const StepView& v) {
      worst = std::max(worst, std::abs(v.state.shock - sp.shock_position));
      for (double r : v.state.free.values()) {
        worst = std::max(worst, std::abs(r - sp.rho_free));
      }
      for (double r : v.state.congested.values()) {
        worst = std::max(worst, std::abs(r - sp.rho_congested));
      }
    };
    run(s, Policy::backstepping, opt);
    run(s, Policy::open_loop, opt);
  }
  return {worst <= 1e-12, "max drift from setpoint over 1000 steps = " + sci(worst)};
}

double backend_gap(Scenario s, std::size_t n) {
  s.n_cells = n;
  s.plant = PlantKind::linearized;
  const RunResult ref = run(s, Policy::open_loop);
  s.plant = PlantKind::nonlinear;
  const RunResult fv = run(s, Policy::open_loop);
  double e = 0.0;
  for (std::size_t k = 0; k < std::min(ref.trace.size(), fv.trace.size()); ++k) {
    e = std::max(e, std::abs(ref.trace[k].shock - fv.trace[k].shock));
  }
  return e;
}

Outcome backend_agreement(std::mt19937_64&) {
  Scenario s = base_scenario();
  s.amplitude_scale = 0.2; // deviations of 2% rho_m
  s.horizon = 20.0;
  const double e1 = backend_gap(s, 50);
  const double e2 = backend_gap(s, 100);
  return {e2 < e1 && e1 / e2 >= 1.5,
          "max |l_fv - l_lin|: " + sci(e1) + " (n=50), " + sci(e2) + " (n=100)"};
}

Outcome discrete_conservation(std::mt19937_64&) {
  Scenario s = base_scenario();
  s.plant = PlantKind::nonlinear;
  s.horizon = 30.0;
  s.n_cells = 100;
  const double d1 = run(s, Policy::backstepping).summary.max_mass_drift;
  s.n_cells = 200;
  const double d2 = run(s, Policy::backstepping).summary.max_mass_drift;
  return {d2 < d1 && d1 / d2 >= 1.5,
          "relative drift net of boundary flux: " + sci(d1) + " (n=100), " + sci(d2) +
              " (n=200)"};
}

Outcome interface_speed_sign(std::mt19937_64& rng) {
  const FundamentalDiagram fd(40.0, 0.16);
  std::uniform_real_distribution<double> f(0.0, fd.jump_density());
  std::uniform_real_distribution<double> c(fd.jump_density(), fd.rho_max());
  int tested = 0;
  int wrong = 0;
  while (tested < 1000) {
    const double rf = f(rng);
    const double rc = c(rng);
    if (rf + rc <= fd.rho_max() * (1.0 + 1e-12)) {
      continue;
    }
    ++tested;
    wrong += interface_speed(rf, rc, fd) < 0.0 ? 0 : 1;
  }
  return {wrong == 0, std::to_string(wrong) + " of 1000 samples with rho_f + rho_c > rho_m moved "
                                             "downstream"};
}

Outcome delay_identity(std::mt19937_64&) {
  Scenario s = base_scenario();
  s.plant = PlantKind::linearized;
  s.horizon = 30.0;
  const Setpoint sp = s.setpoint();
  const double u = s.params().transport_speed;
  double worst = 0.0;
  RunOptions opt;
  opt.observer = [&](const StepView& v) {
    const double t = v.state.time;
    const double l = v.state.shock;
    const double a = v.state.free.back() - sp.rho_free;
    const double b = v.inflow.at(t - l / u);
    const double c = v.state.congested.front() - sp.rho_congested;
    const double d = v.outflow.at(t - (sp.length - l) / u);
    const double floor = 1e-9 * s.rho_max;
    worst = std::max({worst, std::abs(a - b) / std::max(std::abs(b), floor),
                      std::abs(c - d) / std::max(std::abs(d), floor)});
  };
  run(s, Policy::backstepping, opt);
  return {worst <= 1e-6, "max relative mismatch = " + sci(worst)};
}

// ---- control ---------------------------------------------------------------

Outcome branch_continuity(std::mt19937_64& rng) {
  const Scenario s = base_scenario();
  const Setpoint sp = s.setpoint();
  const auto params = s.params();
  const auto gains = s.gains();
  double worst_fine = 0.0;
  double worst_coarse = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const SmoothField f = random_field(rng, 0.05 * s.rho_max, sp.length);
    const SmoothField c = random_field(rng, 0.05 * s.rho_max, sp.length);
    auto controls = [&](double l) {
      const PlantState st = state_from(sp, l, 400, f, c);
      return backstepping_controls(st, sp, gains, params);
    };
    const ControlInput mid = controls(0.5 * sp.length);
    for (double eps : {1e-2, 1e-6}) {
      for (double sgn : {-1.0, 1.0}) {
        const ControlInput side = controls(0.5 * sp.length + sgn * eps);
        const double d = std::max(std::abs(side.u_in - mid.u_in), std::abs(side.u_out - mid.u_out));
        (eps > 1e-4 ? worst_coarse : worst_fine) = std::max(eps > 1e-4 ? worst_coarse : worst_fine, d);
      }
    }
  }
  return {worst_fine <= 1e-3 * worst_coarse + 1e-15,
          "max jump at L/2 +- 1e-2: " + sci(worst_coarse) + ", at L/2 +- 1e-6: " + sci(worst_fine)};
}

Outcome control_linearity(std::mt19937_64& rng) {
  const Scenario s = base_scenario();
  const Setpoint sp = s.setpoint();
  const auto params = s.params();
  const auto gains = s.gains();
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_real_distribution<double> pos(0.1 * sp.length, 0.9 * sp.length);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double l = pos(rng);
    const SmoothField f1 = random_field(rng, 0.05 * s.rho_max, sp.length);
    const SmoothField c1 = random_field(rng, 0.05 * s.rho_max, sp.length);
    const SmoothField f2 = random_field(rng, 0.05 * s.rho_max, sp.length);
    const SmoothField c2 = random_field(rng, 0.05 * s.rho_max, sp.length);
    const double x1 = 50.0 * coef(rng);
    const double x2 = 50.0 * coef(rng);
    const double a = coef(rng);
    const double b = coef(rng);
    auto eval = [&](const std::function<double(double)>& f, const std::function<double(double)>& c,
                    double x) {
      const PlantState st = state_from(sp, l, 200, f, c);
      const GridDeviations dev(st, sp);
      return backstepping_controls(dev, x, gains, params, 0.0);
    };
    const ControlInput u1 = eval(f1, c1, x1);
    const ControlInput u2 = eval(f2, c2, x2);
    const ControlInput u12 = eval([&](double x) { return a * f1(x) + b * f2(x); },
                                  [&](double x) { return a * c1(x) + b * c2(x); }, a * x1 + b * x2);
    const double scale = std::max({std::abs(u1.u_in), std::abs(u2.u_in), std::abs(u1.u_out),
                                   std::abs(u2.u_out), 1e-12});
    worst = std::max({worst, std::abs(u12.u_in - (a * u1.u_in + b * u2.u_in)) / scale,
                      std::abs(u12.u_out - (a * u1.u_out + b * u2.u_out)) / scale});
  }
  return {worst <= 1e-11, "max relative superposition defect = " + sci(worst)};
}

Outcome quadrature_convergence(std::mt19937_64&) {
  const Scenario s = base_scenario();
  const Setpoint sp = s.setpoint();
  const auto params = s.params();
  const auto gains = s.gains();
  const double l = 200.0;
  const double L = sp.length;
  const double k = 3.0 * M_PI / L;
  const double df = 0.004;
  const double dc = -0.003;
  const double x = 7.0;
  // Closed-form integrals of d cos(k x).
  auto integ = [&](double d, double a, double b) { return d * (std::sin(k * b) - std::sin(k * a)) / k; };
  const double c = params.coupling / params.transport_speed;
  const double exact_in =
      gains.k_free * (x - c * integ(df, 0.0, l) - c * integ(dc, l, std::min(L, 2.0 * l)));
  const double exact_out =
      gains.k_congested * (x - c * integ(dc, l, L) - c * integ(df, std::max(0.0, 2.0 * l - L), l));
  double err[2];
  int i = 0;
  for (std::size_t n : {50, 100}) {
    const PlantState st = state_from(
        sp, l, n, [&](double y) { return df * std::cos(k * y); },
        [&](double y) { return dc * std::cos(k * y); });
    PlantState shifted = st;
    shifted.shock = l;
    const GridDeviations dev(shifted, sp);
    const ControlInput u = backstepping_controls(dev, x, gains, params, 0.0);
    err[i++] = std::max(std::abs(u.u_in - exact_in), std::abs(u.u_out - exact_out));
  }
  const double ratio = err[0] / err[1];
  return {ratio >= 3.5, "error " + sci(err[0]) + " -> " + sci(err[1]) + ", ratio " + sci(ratio)};
}

Outcome delay_ordering(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(1e-3, 500.0 - 1e-3);
  int wrong = 0;
  for (int i = 0; i < 1000; ++i) {
    const double l = pos(rng);
    const Delays d = delays(l, 500.0, 24.0);
    const int a = (d.free > d.congested) - (d.free < d.congested);
    const int b = (l > 250.0) - (l < 250.0);
    wrong += a == b ? 0 : 1;
  }
  return {wrong == 0, std::to_string(wrong) + " of 1000 positions out of order"};
}

// ---- backstepping_xform ----------------------------------------------------

Outcome round_trip(std::mt19937_64& rng, bool flip) {
  const Scenario s = base_scenario();
  const Setpoint sp = s.setpoint();
  const auto params = s.params();
  const auto gains = s.gains();
  const ControlGains forward_gains =
      flip ? ControlGains{-gains.k_free, -gains.k_congested, -gains.a} : gains;
  std::uniform_real_distribution<double> pos(0.1 * sp.length, 0.9 * sp.length);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double l = pos(rng);
    const SmoothField f = random_field(rng, 0.05 * s.rho_max, sp.length);
    const SmoothField c = random_field(rng, 0.05 * s.rho_max, sp.length);
    const PlantState st = state_from(sp, l, 400, f, c);
    const TargetState t = forward_transform(st, sp, forward_gains, params);
    const PlantDeviations back = inverse_transform(t, sp, gains, params);
    const NodalField df = st.free.minus(sp.rho_free);
    const NodalField dc = st.congested.minus(sp.rho_congested);
    const double scale = std::max(max_abs(df.values()), max_abs(dc.values()));
    worst = std::max({worst, max_abs_diff(df.values(), back.free.values()) / scale,
                      max_abs_diff(dc.values(), back.congested.values()) / scale});
  }
  return {worst <= 1e-8, "max relative round-trip error over 100 fields = " + sci(worst)};
}

Outcome boundary_annihilation(std::mt19937_64&) {
  Scenario s = base_scenario();
  s.plant = PlantKind::linearized;
  s.quadrature = ControlQuadrature::characteristics;
  s.horizon = 30.0;
  const Setpoint sp = s.setpoint();
  const auto params = s.params();
  const auto gains = s.gains();
  double worst = 0.0;
  RunOptions opt;
  opt.observer = [&](const StepView& v) {
    const CharacteristicDeviations dev(v.inflow, v.outflow, v.state.time, v.state.shock,
                                       sp.length, params.transport_speed);
    const double x = v.state.shock - sp.shock_position;
    worst = std::max({worst, std::abs(target_free_at(dev, 0.0, x, gains, params)),
                      std::abs(target_congested_at(dev, sp.length, x, gains, params))});
  };
  run(s, Policy::backstepping, opt);
  return {worst <= 1e-10 * s.rho_max, "max |w_f(0)|, |w_c(L)| = " + sci(worst)};
}

Outcome interface_relations(std::mt19937_64& rng) {
  const Scenario s = base_scenario();
  const Setpoint sp = s.setpoint();
  const auto params = s.params();
  const auto gains = s.gains();
  std::uniform_real_distribution<double> pos(0.1 * sp.length, 0.9 * sp.length);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double l = pos(rng);
    const SmoothField f = random_field(rng, 0.05 * s.rho_max, sp.length);
    const SmoothField c = random_field(rng, 0.05 * s.rho_max, sp.length);
    const PlantState st = state_from(sp, l, 200, f, c);
    const TargetState t = forward_transform(st, sp, gains, params);
    const double x = l - sp.shock_position;
    worst = std::max(
        {worst, std::abs(t.w_free.back() - (st.free.back() - sp.rho_free) + gains.k_free * x),
         std::abs(t.w_congested.front() - (st.congested.front() - sp.rho_congested) +
                  gains.k_congested * x)});
  }
  return {worst <= 1e-15, "max interface defect = " + sci(worst)};
}

Outcome residual_convergence(std::mt19937_64&) {
  std::vector<ResidualReport> reps;
  for (int r : {1, 2, 4}) {
    Scenario s = base_scenario();
    s.plant = PlantKind::linearized;
    s.n_cells = 100 * static_cast<std::size_t>(r);
    s.dt = 0.02 / r;
    s.horizon = 30.0;
    RunOptions opt;
    opt.keep_trajectory = true;
    const RunResult res = run(s, Policy::backstepping, opt);
    // Start once the t = 0 mismatch between initial data and feedback has left.
    reps.push_back(target_residual(res.trajectory, s.gains(), s.params(), s.setpoint(), {20.0, 3.0}));
  }
  auto decreasing = [&](double ResidualReport::*m) {
    return reps[1].*m < reps[0].*m && reps[2].*m < reps[1].*m && reps[0].*m >= 3.0 * reps[2].*m;
  };
  const bool ok = decreasing(&ResidualReport::pde_free_l1) &&
                  decreasing(&ResidualReport::pde_congested_l1) &&
                  decreasing(&ResidualReport::ode_l1);
  return {ok, "L1 residuals (free, congested, ode) at dt/h x1,x2,x4: " + sci(reps[0].pde_free_l1) +
                  "/" + sci(reps[1].pde_free_l1) + "/" + sci(reps[2].pde_free_l1) + ", " +
                  sci(reps[0].pde_congested_l1) + "/" + sci(reps[1].pde_congested_l1) + "/" +
                  sci(reps[2].pde_congested_l1) + ", " + sci(reps[0].ode_l1) + "/" +
                  sci(reps[1].ode_l1) + "/" + sci(reps[2].ode_l1)};
}

// ---- diagnostics -----------------------------------------------------------

Outcome definition_audit_check(std::mt19937_64&) {
  Scenario s = base_scenario();
  s.plant = PlantKind::linearized;
  s.horizon = 20.0;
  const RunResult r = run(s, Policy::backstepping);
  const LyapunovWeights w = LyapunovWeights::standard(s.gains(), s.params());
  std::size_t bad = 0;
  for (const auto& rec : r.trace) {
    bad += definition_audit(rec, w) ? 0 : 1;
  }
  return {bad == 0, std::to_string(bad) + " of " + std::to_string(r.trace.size()) +
                        " records fail V = V1 + V2 + lambda (V3 + V4) + V5"};
}

bool monotone_after(const MetricsTrace& tr, double t0) {
  for (std::size_t k = 1; k < tr.size(); ++k) {
    if (tr[k].t >= t0 && tr[k].lyap.v > tr[k - 1].lyap.v * (1.0 + 1e-12)) {
      return false;
    }
  }
  return true;
}

Outcome monotone_decay(std::mt19937_64&) {
  Scenario s = base_scenario();
  s.plant = PlantKind::linearized;
  s.horizon = 40.0;
  const auto entries = sweep(s, "amplitude_scale", {1.0, 0.5, 0.25, 0.125}, Policy::backstepping);
  std::string detail = "monotone after 2 s at scale";
  bool small_ok = true;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const bool ok = entries[i].result && monotone_after(entries[i].result->trace, 2.0);
    detail += " " + sci(entries[i].value) + (ok ? ":yes" : ":no");
    if (i >= 2) {
      small_ok = small_ok && ok;
    }
  }
  return {small_ok, detail};
}

Outcome lambda_guard(std::mt19937_64&) {
  const Scenario s = base_scenario();
  const auto gains = s.gains();
  const auto params = s.params();
  const double bound = LyapunovWeights::lower_bound(gains, params);
  bool rejected = false;
  try {
    LyapunovWeights(bound * (1.0 - 1e-9), gains, params);
  } catch (const ConfigError&) {
    rejected = true;
  }
  bool rejected_equal = false;
  try {
    LyapunovWeights(bound, gains, params);
  } catch (const ConfigError&) {
    rejected_equal = true;
  }
  bool accepted = true;
  try {
    LyapunovWeights(bound * (1.0 + 1e-9), gains, params);
  } catch (const ConfigError&) {
    accepted = false;
  }
  return {rejected && rejected_equal && accepted, "bound 4b/(a u) = " + sci(bound)};
}

Outcome validity_implication_check(std::mt19937_64&) {
  Scenario s = base_scenario();
  s.horizon = 60.0;
  std::size_t records = 0;
  std::size_t bad = 0;
  for (PlantKind k : {PlantKind::linearized, PlantKind::nonlinear}) {
    s.plant = k;
    for (const auto& e :
         sweep(s, "amplitude_scale", {1.0, 0.5, 0.25, 0.125}, Policy::backstepping)) {
      if (!e.result) {
        ++bad;
        continue;
      }
      for (const auto& r : e.result->trace) {
        ++records;
        bad += validity_implication(r, s.setpoint()) ? 0 : 1;
      }
    }
  }
  return {bad == 0 && records > 0,
          std::to_string(bad) + " violations over " + std::to_string(records) + " records"};
}

// ---- experiment_cli --------------------------------------------------------

Outcome determinism(std::mt19937_64&) {
  Scenario s = base_scenario();
  s.horizon = 5.0;
  auto render = [&] {
    std::ostringstream os;
    write_trace_csv(os, run(s, Policy::backstepping).trace);
    return os.str();
  };
  const std::string a = render();
  const std::string b = render();
  return {a == b && !a.empty(), "trace bytes " + std::to_string(a.size()) + (a == b ? ", identical" : ", differ")};
}

Outcome config_echo(std::mt19937_64&) {
  std::vector<std::string> log_all;
  std::istringstream empty;
  parse_scenario(empty, &log_all);
  std::vector<std::string> log_some;
  std::istringstream some("[control]\nk_f_veh_per_m2 = 3e-4\n[physical]\nv_m_kmph = 144\n");
  parse_scenario(some, &log_some);
  auto count = [](const std::vector<std::string>& log, const std::string& key) {
    std::size_t n = 0;
    for (const auto& line : log) {
      n += line.rfind("default " + key + " =", 0) == 0 ? 1 : 0;
    }
    return n;
  };
  bool ok = count(log_some, "control.k_f_veh_per_m2") == 0 &&
            count(log_some, "physical.v_m_mps") == 0 &&
            count(log_some, "control.k_c_veh_per_m2") == 1;
  std::size_t keys = 0;
  for (const auto& line : log_all) {
    const auto eq = line.find(" =");
    ok = ok && count(log_all, line.substr(8, eq - 8)) == 1;
    ++keys;
  }
  return {ok && keys > 0, std::to_string(keys) + " defaults echoed once each"};
}

Outcome figure_data(std::mt19937_64&) {
  Scenario s = base_scenario();
  s.horizon = 60.0;
  s.snapshot_times = {0.0, s.horizon};
  const Comparison c = compare(s);
  const bool closed_ok = c.closed_loop.status == RunStatus::completed &&
                         c.closed_loop.snapshots.size() == 2 &&
                         c.closed_loop.trace.size() == s.steps() + 1;
  const bool open_ok = c.open_loop.status == RunStatus::domain_exit &&
                       c.open_loop.snapshots.size() == 2;
  std::ostringstream prof;
  write_profile_csv(prof, c.closed_loop.snapshots.front().state);
  const std::string p = prof.str();
  const bool profile_ok = p.rfind("x_m,rho_veh_per_km,regime\n", 0) == 0 &&
                          p.find(",free\n") != std::string::npos &&
                          p.find(",congested\n") != std::string::npos;
  std::ostringstream cmp;
  write_comparison_csv(cmp, c);
  const std::string cs = cmp.str();
  const auto rows = static_cast<std::size_t>(std::count(cs.begin(), cs.end(), '\n')) - 1;
  const bool rows_ok = rows == std::min(c.closed_loop.trace.size(), c.open_loop.trace.size());
  return {closed_ok && open_ok && profile_ok && rows_ok,
          "profiles at t=0 and end, l(t) open vs closed (" + std::to_string(rows) +
              " rows), U_in/U_out series present"};
}

} // namespace

std::vector<CheckResult> validate_suite(const ValidateOptions& options) {
  struct Check {
    const char* module;
    const char* name;
    std::function<Outcome(std::mt19937_64&)> fn;
  };
  const bool flip = options.flip_transform_sign;
  const std::vector<Check> checks = {
      {"traffic_core", "flux_symmetry", flux_symmetry},
      {"traffic_core", "characteristic_speed_antisymmetry", speed_antisymmetry},
      {"traffic_core", "matched_setpoint_invariants", setpoint_invariants},
      {"traffic_core", "derivative_exactness", derivative_exact},
      {"plant", "equilibrium_fixed_point", equilibrium_fixed_point},
      {"plant", "backend_agreement", backend_agreement},
      {"plant", "discrete_conservation", discrete_conservation},
      {"plant", "interface_speed_sign", interface_speed_sign},
      {"plant", "delay_identity", delay_identity},
      {"control", "branch_continuity", branch_continuity},
      {"control", "linearity", control_linearity},
      {"control", "quadrature_convergence", quadrature_convergence},
      {"control", "delay_ordering", delay_ordering},
      {"backstepping_xform", "round_trip_identity",
       [flip](std::mt19937_64& rng) { return round_trip(rng, flip); }},
      {"backstepping_xform", "boundary_annihilation", boundary_annihilation},
      {"backstepping_xform", "interface_relations", interface_relations},
      {"backstepping_xform", "residual_convergence", residual_convergence},
      {"diagnostics", "definition_audit", definition_audit_check},
      {"diagnostics", "monotone_decay_small_data", monotone_decay},
      {"diagnostics", "lambda_guard", lambda_guard},
      {"diagnostics", "validity_implication", validity_implication_check},
      {"experiment_cli", "determinism", determinism},
      {"experiment_cli", "config_echo_completeness", config_echo},
      {"experiment_cli", "figure_data_fidelity", figure_data},
  };

  std::vector<CheckResult> results(checks.size());
  const auto n = static_cast<long>(checks.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const Check& c = checks[idx];
    std::mt19937_64 rng(options.seed + idx);
    CheckResult& r = results[idx];
    r.module = c.module;
    r.name = c.name;
    try {
      const Outcome o = c.fn(rng);
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("threw: ") + e.what();
    }
  }
  return results;
}

} // namespace shockctl
