#include "shockctl/output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "shockctl/errors.hpp"

namespace shockctl {

namespace {

// Appends "%.10e" plus a separator.
void put(std::string& line, double v, char sep = ',') {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  line += buf;
  line += sep;
}

std::string opt(const std::optional<double>& v) {
  if (!v) {
    return "";
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) {
    throw ConfigError("cannot write " + p.string());
  }
  return f;
}

} // namespace

void write_trace_csv(std::ostream& os, const MetricsTrace& trace) {
  os << "t_s,l_m,X_m,u_in_veh_per_m,u_out_veh_per_m,V,V1,V2,V3,V4,V5,h1_free,h1_congested,Z,"
        "event\n";
  std::string line;
  for (const auto& r : trace) {
    line.clear();
    put(line, r.t);
    put(line, r.shock);
    put(line, r.x_dev);
    put(line, r.u_in);
    put(line, r.u_out);
    put(line, r.lyap.v);
    put(line, r.lyap.v1);
    put(line, r.lyap.v2);
    put(line, r.lyap.v3);
    put(line, r.lyap.v4);
    put(line, r.lyap.v5);
    put(line, r.h1_free);
    put(line, r.h1_congested);
    put(line, r.z);
    line += r.events;
    line += '\n';
    os << line;
  }
}

void write_profile_csv(std::ostream& os, const PlantState& state) {
  os << "x_m,rho_veh_per_km,regime\n";
  std::string line;
  auto side = [&](const NodalField& f, const char* regime) {
    for (std::size_t i = 0; i < f.n_nodes(); ++i) {
      line.clear();
      put(line, f.node(i));
      put(line, f[i] / kPerKm);
      line += regime;
      line += '\n';
      os << line;
    }
  };
  side(state.free, "free");
  side(state.congested, "congested");
}

void write_actuation_csv(std::ostream& os, const MetricsTrace& trace,
                         const std::vector<FluxActuation>& actuation) {
  os << "t_s,q_in_veh_per_s,q_out_veh_per_s\n";
  std::string line;
  for (std::size_t k = 0; k < std::min(trace.size(), actuation.size()); ++k) {
    line.clear();
    put(line, trace[k].t);
    put(line, actuation[k].q_in);
    put(line, actuation[k].q_out, '\n');
    os << line;
  }
}

void write_comparison_csv(std::ostream& os, const Comparison& c) {
  os << "t_s,l_closed_m,l_open_m,u_in_closed_veh_per_m,u_out_closed_veh_per_m,"
        "u_in_open_veh_per_m,u_out_open_veh_per_m\n";
  const auto& a = c.closed_loop.trace;
  const auto& b = c.open_loop.trace;
  std::string line;
  for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
    line.clear();
    put(line, a[k].t);
    put(line, a[k].shock);
    put(line, b[k].shock);
    put(line, a[k].u_in);
    put(line, a[k].u_out);
    put(line, b[k].u_in);
    put(line, b[k].u_out, '\n');
    os << line;
  }
}

void write_sweep_csv(std::ostream& os, const std::string& key,
                     const std::vector<SweepEntry>& entries) {
  os << key << ",status,settle_time_s,exit_time_s,max_abs_u_veh_per_m,V0,sigma0_per_s,"
               "r_squared,max_x_sq_m2,error\n";
  for (const auto& e : entries) {
    std::string line;
    put(line, e.value);
    if (!e.result) {
      line += "config_error,,,,,,,," + e.error + "\n";
      os << line;
      continue;
    }
    const RunResult& r = *e.result;
    double max_x2 = 0.0;
    for (const auto& rec : r.trace) {
      max_x2 = std::max(max_x2, rec.x_dev * rec.x_dev);
    }
    line += to_string(r.status);
    line += ',' + opt(r.summary.settle_time) + ',' + opt(r.summary.exit_time) + ',';
    put(line, r.summary.max_abs_input);
    put(line, r.trace.empty() ? 0.0 : r.trace.front().lyap.v);
    line += r.summary.decay ? opt(r.summary.decay->sigma0) + ',' + opt(r.summary.decay->r_squared)
                            : std::string(",");
    line += ',';
    put(line, max_x2);
    line += r.error + "\n";
    os << line;
  }
}

std::string summary_text(const RunResult& r) {
  std::string s;
  s += "policy: " + std::string(to_string(r.policy)) + "\n";
  s += "status: " + std::string(to_string(r.status)) + "\n";
  if (!r.error.empty()) {
    s += "error: " + r.error + "\n";
  }
  s += "records: " + std::to_string(r.trace.size()) + "\n";
  if (!r.trace.empty()) {
    s += "final_l_m: " + opt(r.trace.back().shock) + "\n";
  }
  s += "settle_time_s: " + (r.summary.settle_time ? opt(r.summary.settle_time) : "none") + "\n";
  if (r.summary.exit_time) {
    s += "exit_time_s: " + opt(r.summary.exit_time) + "\n";
    s += std::string("exit_side: ") +
         (r.summary.exit_side == ExitSide::upstream ? "upstream" : "downstream") + "\n";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", r.summary.max_abs_input);
  s += std::string("max_abs_u_veh_per_m: ") + buf + "\n";
  if (r.summary.decay) {
    s += "sigma0_per_s: " + opt(r.summary.decay->sigma0) + "\n";
    s += "r_squared: " + opt(r.summary.decay->r_squared) + "\n";
  }
  s += "saturated_steps: " + std::to_string(r.summary.saturated_steps) + "\n";
  std::snprintf(buf, sizeof buf, "%.3e", r.summary.max_mass_drift);
  s += std::string("max_mass_drift_rel: ") + buf + "\n";
  return s;
}

void write_run_files(const std::string& dir, const RunResult& r) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    auto f = open_out(fs::path(dir) / "trace.csv");
    write_trace_csv(f, r.trace);
  }
  {
    auto f = open_out(fs::path(dir) / "actuation.csv");
    write_actuation_csv(f, r.trace, r.actuation);
  }
  for (const auto& snap : r.snapshots) {
    char name[64];
    std::snprintf(name, sizeof name, "profile_t%.2f.csv", snap.t);
    auto f = open_out(fs::path(dir) / name);
    write_profile_csv(f, snap.state);
  }
  {
    auto f = open_out(fs::path(dir) / "summary.txt");
    f << summary_text(r);
  }
}

} // namespace shockctl
