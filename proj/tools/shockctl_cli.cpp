// shockctl: run, compare, sweep and validate the shock-position controller.
//
// Exit codes: 0 ok, 2 config error, 3 solver error, 4 validation failure.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "shockctl/errors.hpp"
#include "shockctl/experiment.hpp"
#include "shockctl/output.hpp"
#include "shockctl/scenario.hpp"
#include "shockctl/validate.hpp"

namespace fs = std::filesystem;
using namespace shockctl;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kSolverError = 3;
constexpr int kValidationFailure = 4;

struct Common {
  std::string config;
  std::string out_dir = "out";
  double horizon = 0.0;
  std::uint64_t seed = ValidateOptions{}.seed;
};

Scenario load(const Common& c, std::vector<std::string>& log) {
  Scenario s;
  if (c.config.empty()) {
    std::istringstream empty;
    s = parse_scenario(empty, &log);
  } else {
    s = load_scenario(c.config, &log);
  }
  if (c.horizon > 0.0) {
    const bool default_snaps = s.snapshot_times.size() == 2 && s.snapshot_times[0] == 0.0 &&
                               s.snapshot_times[1] == s.horizon;
    s.horizon = c.horizon;
    if (default_snaps) {
      s.snapshot_times = {0.0, s.horizon};
    }
    log.push_back("override run.horizon_s = " + std::to_string(c.horizon));
    validate(s);
  }
  return s;
}

void write_log(const fs::path& dir, const std::vector<std::string>& log) {
  fs::create_directories(dir);
  std::ofstream f(dir / "run.log", std::ios::binary);
  for (const auto& line : log) {
    f << line << '\n';
    std::cerr << line << '\n';
  }
}

void write_config(const fs::path& dir, const Scenario& s) {
  std::ofstream f(dir / "scenario.ini", std::ios::binary);
  f << to_ini(s);
}

int status_code(const RunResult& r) {
  return r.status == RunStatus::solver_error ? kSolverError : kOk;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) {
      continue;
    }
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("--values: '" + item + "' is not a number");
    }
  }
  return v;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shock-front boundary control: simulation, comparison, sweeps, property suite"};
  app.require_subcommand(1);
  Common c;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", c.config, "INI scenario file (defaults when omitted)");
    sub->add_option("--out-dir", c.out_dir, "Output directory");
    sub->add_option("--horizon", c.horizon, "Override run.horizon_s")->check(CLI::PositiveNumber);
    sub->add_option("--seed", c.seed, "Seed for property-suite field generation");
  };

  std::string policy = "backstepping";
  auto* run_cmd = app.add_subcommand("run", "Single run; writes trace, profiles and summary");
  add_common(run_cmd);
  run_cmd->add_option("--policy", policy, "backstepping | open_loop");

  auto* compare_cmd = app.add_subcommand("compare", "Closed and open loop from the same data");
  add_common(compare_cmd);

  std::string param;
  std::string values;
  auto* sweep_cmd = app.add_subcommand("sweep", "One run per parameter value");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--policy", policy, "backstepping | open_loop");
  sweep_cmd->add_option("--param", param, "Sweepable key")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated values")->required();

  std::string fault;
  auto* validate_cmd = app.add_subcommand("validate", "Property suite over all modules");
  add_common(validate_cmd);
  validate_cmd->add_option("--inject-fault", fault, "transform-sign: flip the transform gains");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    std::vector<std::string> log;
    const fs::path out(c.out_dir);

    if (*validate_cmd) {
      ValidateOptions opt;
      opt.seed = c.seed;
      if (fault == "transform-sign") {
        opt.flip_transform_sign = true;
      } else if (!fault.empty()) {
        throw ConfigError("unknown fault '" + fault + "'");
      }
      const auto results = validate_suite(opt);
      bool ok = true;
      fs::create_directories(out);
      std::ofstream f(out / "validate.txt", std::ios::binary);
      for (const auto& r : results) {
        std::string line = std::string(r.passed ? "PASS" : "FAIL") + "  " + r.module + "  " +
                           r.name + "  " + r.detail;
        std::cout << line << '\n';
        f << line << '\n';
        ok = ok && r.passed;
      }
      std::cout << (ok ? "all checks passed" : "validation FAILED") << '\n';
      return ok ? kOk : kValidationFailure;
    }

    const Scenario s = load(c, log);

    if (*run_cmd) {
      const Policy p = parse_policy(policy);
      log.push_back(std::string("policy = ") + to_string(p));
      write_log(out, log);
      const RunResult r = run(s, p);
      write_run_files(out.string(), r);
      write_config(out, s);
      std::cout << summary_text(r);
      return status_code(r);
    }

    if (*compare_cmd) {
      write_log(out, log);
      const Comparison cmp = compare(s);
      write_run_files((out / "closed_loop").string(), cmp.closed_loop);
      write_run_files((out / "open_loop").string(), cmp.open_loop);
      write_config(out, s);
      {
        std::ofstream f(out / "comparison.csv", std::ios::binary);
        write_comparison_csv(f, cmp);
      }
      std::cout << "[closed loop]\n"
                << summary_text(cmp.closed_loop) << "[open loop]\n"
                << summary_text(cmp.open_loop);
      return std::max(status_code(cmp.closed_loop), status_code(cmp.open_loop));
    }

    if (*sweep_cmd) {
      const Policy p = parse_policy(policy);
      const std::vector<double> vals = parse_values(values);
      log.push_back("sweep " + param + " over " + std::to_string(vals.size()) + " values");
      write_log(out, log);
      const auto entries = sweep(s, param, vals, p);
      int code = kOk;
      for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (!e.result) {
          code = std::max(code, kConfigError);
          continue;
        }
        char name[32];
        std::snprintf(name, sizeof name, "run_%03zu", i);
        write_run_files((out / name).string(), *e.result);
        code = std::max(code, status_code(*e.result));
      }
      write_config(out, s);
      std::ofstream f(out / "sweep.csv", std::ios::binary);
      write_sweep_csv(f, param, entries);
      write_sweep_csv(std::cout, param, entries);
      return code;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const SetpointError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolverError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
