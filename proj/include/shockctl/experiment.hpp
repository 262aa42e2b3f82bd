#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "shockctl/backstepping.hpp"
#include "shockctl/diagnostics.hpp"
#include "shockctl/history.hpp"
#include "shockctl/scenario.hpp"

namespace shockctl {

enum class RunStatus { completed, domain_exit, solver_error };

const char* to_string(RunStatus s);

struct RunSummary {
  std::optional<double> settle_time; // first t after which |X| <= settle_band holds
  std::optional<double> exit_time;
  std::optional<ExitSide> exit_side;
  double max_abs_input = 0.0;
  std::optional<DecayFit> decay; // ln V fit over [2 s, min(40 s, end)]
  std::size_t saturated_steps = 0;
  double max_mass_drift = 0.0; // |M(t) - M(0) - int (q_in - q_out)| / M(0), nonlinear only
};

struct Snapshot {
  double t;
  PlantState state;
};

/// Read-only view handed to an observer after each record.
struct StepView {
  const PlantState& state;
  const TargetState& target;
  const AppliedBoundary& boundary;
  const InputHistory& inflow;
  const InputHistory& outflow;
};

struct RunOptions {
  bool keep_trajectory = false;
  std::function<void(const StepView&)> observer;
};

struct RunResult {
  Policy policy = Policy::backstepping;
  RunStatus status = RunStatus::completed;
  std::string error;
  MetricsTrace trace;
  std::vector<Snapshot> snapshots;
  std::vector<TrajectorySample> trajectory; // only with keep_trajectory
  std::vector<FluxActuation> actuation;     // one per record
  RunSummary summary;
};

/// Fixed-step closed or open loop: state -> policy -> boundary -> record -> plant step.
RunResult run(const Scenario& scenario, Policy policy, const RunOptions& options = {});

struct Comparison {
  RunResult closed_loop;
  RunResult open_loop;
};

/// Both policies from the same initial data, run concurrently.
Comparison compare(const Scenario& scenario, const RunOptions& options = {});

struct SweepEntry {
  double value;
  std::optional<RunResult> result;
  std::string error; // config errors are isolated per entry
};

/// One independent run per value; runs execute in parallel.
std::vector<SweepEntry> sweep(const Scenario& scenario, const std::string& key,
                              const std::vector<double>& values, Policy policy,
                              const RunOptions& options = {});

} // namespace shockctl
