#pragma once

// Scenario description and its INI loader. Keys carry their unit in the name
// (v_m_mps, rho_f_star_veh_per_km, dt_s, ...); values are converted to SI on load.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "shockctl/control.hpp"
#include "shockctl/plant.hpp"
#include "shockctl/traffic_core.hpp"

namespace shockctl {

enum class PlantKind { linearized, nonlinear };
enum class Policy { backstepping, open_loop };
/// How the control law's integrals are evaluated on the linearized plant.
enum class ControlQuadrature { grid, characteristics };

struct Scenario {
  // physical
  double v_max = 40.0;   // m/s
  double rho_max = 0.16; // veh/m
  double length = 500.0; // m
  // setpoint
  double rho_free_star = 0.032; // veh/m
  double shock_star = 200.0;    // m
  // initial condition
  double shock0 = 330.0;
  double amp_free = 0.016;      // veh/m
  double amp_congested = 0.016; // veh/m
  double ramp_width = 20.0;     // m
  double amplitude_scale = 1.0; // multiplies l0 - l* and both amplitudes
  // control
  double k_free = 2.0e-4;      // veh/m^2
  double k_congested = 2.0e-4; // veh/m^2
  double lambda = 0.0;         // 0 selects 8b/(a u)
  double saturation_margin = 1.0e-3;
  ControlQuadrature quadrature = ControlQuadrature::characteristics;
  // numerics
  std::size_t n_cells = 200;
  double dt = 0.01;
  double cfl = 0.9;
  PlantKind plant = PlantKind::nonlinear;
  // run
  double horizon = 120.0;
  double settle_band = 5.0; // m
  std::vector<double> snapshot_times{0.0, 120.0};

  FundamentalDiagram diagram() const { return {v_max, rho_max}; }
  Setpoint setpoint() const;
  DerivedParams params() const;
  ControlGains gains() const;
  InitialProfile profile() const;
  std::size_t steps() const;
};

/// Throws ConfigError naming the offending key or constraint.
void validate(const Scenario& s);

/// Parses INI text. `log` receives one "default <key> = <value>" line for every
/// key left at its default.
Scenario parse_scenario(std::istream& in, std::vector<std::string>* log = nullptr);
Scenario load_scenario(const std::string& path, std::vector<std::string>* log = nullptr);

/// Canonical INI rendering (round-trips through parse_scenario).
std::string to_ini(const Scenario& s);

/// Keys accepted by sweep and how they map onto the scenario.
std::vector<std::string> sweepable_keys();
void set_sweep_value(Scenario& s, const std::string& key, double value);

const char* to_string(PlantKind k);
const char* to_string(Policy p);
const char* to_string(ControlQuadrature q);
Policy parse_policy(const std::string& name);

} // namespace shockctl
