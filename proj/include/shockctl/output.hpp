#pragma once

// Flat-file outputs. Numbers are printed with %.10e so identical runs give
// identical bytes.

#include <iosfwd>
#include <string>

#include "shockctl/experiment.hpp"

namespace shockctl {

/// t_s, l_m, X_m, u_in_veh_per_m, u_out_veh_per_m, V, V1..V5, h1_free,
/// h1_congested, Z, event
void write_trace_csv(std::ostream& os, const MetricsTrace& trace);

/// x_m, rho_veh_per_km, regime. The interface appears twice, once per side.
void write_profile_csv(std::ostream& os, const PlantState& state);

/// t_s, q_in_veh_per_s, q_out_veh_per_s
void write_actuation_csv(std::ostream& os, const MetricsTrace& trace,
                         const std::vector<FluxActuation>& actuation);

/// Closed and open loop side by side; rows = shorter trace.
void write_comparison_csv(std::ostream& os, const Comparison& c);

/// One row per sweep entry with the run summary.
void write_sweep_csv(std::ostream& os, const std::string& key,
                     const std::vector<SweepEntry>& entries);

/// Human-readable summary block.
std::string summary_text(const RunResult& r);

/// Writes trace.csv, actuation.csv, profile_t<time>.csv and summary.txt into dir.
void write_run_files(const std::string& dir, const RunResult& r);

} // namespace shockctl
