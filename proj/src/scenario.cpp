#include "shockctl/scenario.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "shockctl/errors.hpp"

namespace shockctl {

namespace pt = boost::property_tree;

Setpoint Scenario::setpoint() const {
  return matched_setpoint(rho_free_star, shock_star, length, diagram());
}

DerivedParams Scenario::params() const { return derived_params(setpoint(), diagram()); }

ControlGains Scenario::gains() const { return make_gains(k_free, k_congested, params()); }

InitialProfile Scenario::profile() const {
  return {shock_star + amplitude_scale * (shock0 - shock_star), amplitude_scale * amp_free,
          amplitude_scale * amp_congested, ramp_width};
}

std::size_t Scenario::steps() const {
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

const char* to_string(PlantKind k) {
  return k == PlantKind::linearized ? "linearized" : "nonlinear";
}
const char* to_string(Policy p) {
  return p == Policy::backstepping ? "backstepping" : "open_loop";
}
const char* to_string(ControlQuadrature q) {
  return q == ControlQuadrature::grid ? "grid" : "characteristics";
}

Policy parse_policy(const std::string& name) {
  if (name == "backstepping") {
    return Policy::backstepping;
  }
  if (name == "open_loop") {
    return Policy::open_loop;
  }
  throw ConfigError("unknown policy '" + name + "' (expected backstepping or open_loop)");
}

namespace {

// Shortest of %.15g / %.17g that reads back to the same double.
std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  if (std::strtod(buf, nullptr) != v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
  }
  return buf;
}

double parse_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": '" + text + "' is not a number");
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) {
    ++used;
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw ConfigError(key + ": '" + text + "' is not a finite number");
  }
  return v;
}

enum class Sign { positive, nonnegative, any };

struct Key {
  std::string section;
  std::string name;
  // Applies the raw text; throws ConfigError on bad values.
  std::function<void(Scenario&, const std::string&)> set;
  std::function<std::string(const Scenario&)> get;
  std::string note;     // shown when the key is defaulted
  std::string alias_of = {}; // same quantity in another unit
};

Key number(std::string section, std::string name, double Scenario::*field, double scale,
           Sign sign, std::string note) {
  const std::string full = section + "." + name;
  return {section, name,
          [=](Scenario& s, const std::string& text) {
            const double v = parse_number(full, text);
            if (sign == Sign::positive && !(v > 0.0)) {
              throw ConfigError(full + " must be > 0 (got " + text + ")");
            }
            if (sign == Sign::nonnegative && v < 0.0) {
              throw ConfigError(full + " must be >= 0 (got " + text + ")");
            }
            s.*field = v * scale;
          },
          [=](const Scenario& s) { return fmt(s.*field / scale); }, std::move(note)};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(number("physical", "v_m_mps", &Scenario::v_max, 1.0, Sign::positive,
                       "free-flow speed not stated by the source scenario"));
    Key kmph = number("physical", "v_m_kmph", &Scenario::v_max, kKmPerHour, Sign::positive, "");
    kmph.alias_of = "physical.v_m_mps";
    k.push_back(std::move(kmph));
    k.push_back(number("physical", "rho_m_veh_per_km", &Scenario::rho_max, kPerKm,
                       Sign::positive, ""));
    k.push_back(number("physical", "L_m", &Scenario::length, 1.0, Sign::positive, ""));
    k.push_back(number("setpoint", "rho_f_star_veh_per_km", &Scenario::rho_free_star, kPerKm,
                       Sign::positive, ""));
    k.push_back(number("setpoint", "l_star_m", &Scenario::shock_star, 1.0, Sign::positive, ""));
    k.push_back(number("initial", "l0_m", &Scenario::shock0, 1.0, Sign::positive, ""));
    k.push_back(number("initial", "amp_free_veh_per_km", &Scenario::amp_free, kPerKm,
                       Sign::any, "initial profile amplitude is a reconstruction"));
    k.push_back(number("initial", "amp_congested_veh_per_km", &Scenario::amp_congested, kPerKm,
                       Sign::any, "initial profile amplitude is a reconstruction"));
    k.push_back(number("initial", "ramp_width_m", &Scenario::ramp_width, 1.0, Sign::positive,
                       "initial profile shape is a reconstruction"));
    k.push_back(number("initial", "amplitude_scale", &Scenario::amplitude_scale, 1.0,
                       Sign::nonnegative, "scales l0 - l* and both amplitudes"));
    k.push_back(number("control", "k_f_veh_per_m2", &Scenario::k_free, 1.0, Sign::positive,
                       "gain not stated by the source scenario"));
    k.push_back(number("control", "k_c_veh_per_m2", &Scenario::k_congested, 1.0,
                       Sign::positive, "gain not stated by the source scenario"));
    k.push_back(number("control", "lambda", &Scenario::lambda, 1.0, Sign::nonnegative,
                       "0 selects 8b/(a u)"));
    k.push_back(number("control", "saturation_margin_veh_per_km", &Scenario::saturation_margin,
                       kPerKm, Sign::nonnegative, "actuation limits are not modelled upstream"));
    k.push_back({"control", "quadrature",
                 [](Scenario& s, const std::string& v) {
                   if (v == "grid") {
                     s.quadrature = ControlQuadrature::grid;
                   } else if (v == "characteristics") {
                     s.quadrature = ControlQuadrature::characteristics;
                   } else {
                     throw ConfigError("control.quadrature must be grid or characteristics");
                   }
                 },
                 [](const Scenario& s) { return std::string(to_string(s.quadrature)); },
                 "linearized plant only"});
    k.push_back({"numerics", "n_cells",
                 [](Scenario& s, const std::string& v) {
                   const double n = parse_number("numerics.n_cells", v);
                   if (n < 3.0 || n != std::floor(n) || n > 1e7) {
                     throw ConfigError("numerics.n_cells must be an integer >= 3");
                   }
                   s.n_cells = static_cast<std::size_t>(n);
                 },
                 [](const Scenario& s) { return std::to_string(s.n_cells); }, ""});
    k.push_back(number("numerics", "dt_s", &Scenario::dt, 1.0, Sign::positive, ""));
    k.push_back(number("numerics", "cfl", &Scenario::cfl, 1.0, Sign::positive, ""));
    k.push_back({"numerics", "plant",
                 [](Scenario& s, const std::string& v) {
                   if (v == "linearized") {
                     s.plant = PlantKind::linearized;
                   } else if (v == "nonlinear") {
                     s.plant = PlantKind::nonlinear;
                   } else {
                     throw ConfigError("numerics.plant must be linearized or nonlinear");
                   }
                 },
                 [](const Scenario& s) { return std::string(to_string(s.plant)); },
                 "the source does not say which plant produced its figures"});
    k.push_back(number("run", "horizon_s", &Scenario::horizon, 1.0, Sign::positive, ""));
    k.push_back(number("run", "settle_band_m", &Scenario::settle_band, 1.0, Sign::positive, ""));
    k.push_back({"run", "snapshot_times_s",
                 [](Scenario& s, const std::string& v) {
                   s.snapshot_times.clear();
                   std::stringstream ss(v);
                   std::string item;
                   while (std::getline(ss, item, ',')) {
                     const double t = parse_number("run.snapshot_times_s", item);
                     if (t < 0.0) {
                       throw ConfigError("run.snapshot_times_s entries must be >= 0");
                     }
                     s.snapshot_times.push_back(t);
                   }
                 },
                 [](const Scenario& s) {
                   std::string out;
                   for (std::size_t i = 0; i < s.snapshot_times.size(); ++i) {
                     out += (i ? "," : "") + fmt(s.snapshot_times[i]);
                   }
                   return out;
                 },
                 "0 and the horizon"});
    return k;
  }();
  return table;
}

} // namespace

void validate(const Scenario& s) {
  FundamentalDiagram fd = [&] {
    try {
      return s.diagram();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("physical: ") + e.what());
    }
  }();
  if (!(s.shock_star > 0.0 && s.shock_star < s.length)) {
    throw ConfigError("setpoint.l_star_m must satisfy 0 < l* < L_m (got " + fmt(s.shock_star) +
                      " with L_m = " + fmt(s.length) + ")");
  }
  if (!(s.rho_free_star > 0.0 && s.rho_free_star < fd.jump_density())) {
    throw ConfigError("setpoint.rho_f_star_veh_per_km must satisfy 0 < rho_f* < rho_m / 2");
  }
  Setpoint sp;
  try {
    sp = s.setpoint();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("setpoint: ") + e.what());
  }
  if (!(s.shock0 > 0.0 && s.shock0 < s.length)) {
    throw ConfigError("initial.l0_m must satisfy 0 < l0 < L");
  }
  const InitialProfile p = s.profile();
  const double jump = fd.jump_density();
  if (!(sp.rho_free + p.amp_free > 0.0 && sp.rho_free + p.amp_free < jump &&
        sp.rho_free + std::min(0.0, p.amp_free) > 0.0)) {
    throw ConfigError("initial.amp_free_veh_per_km must keep rho_f* + amp in (0, rho_jump)");
  }
  if (!(sp.rho_congested + p.amp_congested > jump &&
        sp.rho_congested + p.amp_congested < fd.rho_max())) {
    throw ConfigError(
        "initial.amp_congested_veh_per_km must keep rho_c* + amp in (rho_jump, rho_m)");
  }
  if (!(s.saturation_margin < 0.5 * std::min(sp.rho_free, sp.rho_congested - jump))) {
    throw ConfigError("control.saturation_margin_veh_per_km leaves no admissible input range");
  }
  if (s.lambda != 0.0) {
    const double bound = 4.0 * s.params().coupling / (s.gains().a * s.params().transport_speed);
    if (!(s.lambda > bound)) {
      throw ConfigError("control.lambda must exceed 4b/(a u) = " + fmt(bound));
    }
  }
  s.gains();
  if (!(s.cfl > 0.0 && s.cfl <= 1.0)) {
    throw ConfigError("numerics.cfl must lie in (0, 1]");
  }
  if (s.n_cells < 3) {
    throw ConfigError("numerics.n_cells must be >= 3");
  }
  if (!(s.dt > 0.0)) {
    throw ConfigError("numerics.dt_s must be > 0");
  }
  if (!(s.horizon > 0.0)) {
    throw ConfigError("run.horizon_s must be > 0");
  }
  if (s.horizon / s.dt > 1e8) {
    throw ConfigError("run.horizon_s / numerics.dt_s exceeds 1e8 steps");
  }
}

Scenario parse_scenario(std::istream& in, std::vector<std::string>* log) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }

  std::map<std::string, const Key*> by_name;
  std::set<std::string> sections;
  for (const Key& k : keys()) {
    by_name[k.section + "." + k.name] = &k;
    sections.insert(k.section);
  }

  Scenario s;
  std::set<std::string> seen;
  for (const auto& [section, body] : tree) {
    if (!sections.count(section)) {
      throw ConfigError("unknown section [" + section + "]");
    }
    if (!body.data().empty() && body.empty()) {
      throw ConfigError("key '" + section + "' outside any section");
    }
    for (const auto& [name, value] : body) {
      const std::string full = section + "." + name;
      const auto it = by_name.find(full);
      if (it == by_name.end()) {
        throw ConfigError("unknown key " + full);
      }
      it->second->set(s, value.data());
      const std::string canonical =
          it->second->alias_of.empty() ? full : it->second->alias_of;
      if (!seen.insert(canonical).second) {
        throw ConfigError("key " + full + " given twice (possibly in another unit)");
      }
    }
  }
  if (!seen.count("run.snapshot_times_s")) {
    s.snapshot_times = {0.0, s.horizon};
  }
  validate(s);

  if (log) {
    for (const Key& k : keys()) {
      const std::string full = k.section + "." + k.name;
      if (k.alias_of.empty() && !seen.count(full)) {
        std::string line = "default " + full + " = " + k.get(s);
        if (!k.note.empty()) {
          line += "  (" + k.note + ")";
        }
        log->push_back(std::move(line));
      }
    }
  }
  return s;
}

Scenario load_scenario(const std::string& path, std::vector<std::string>* log) {
  std::ifstream f(path);
  if (!f) {
    throw ConfigError("cannot open config file " + path);
  }
  return parse_scenario(f, log);
}

std::string to_ini(const Scenario& s) {
  std::string out;
  std::string section;
  for (const Key& k : keys()) {
    if (!k.alias_of.empty()) {
      continue;
    }
    if (k.section != section) {
      section = k.section;
      out += (out.empty() ? "[" : "\n[") + section + "]\n";
    }
    out += k.name + " = " + k.get(s) + "\n";
  }
  return out;
}

std::vector<std::string> sweepable_keys() {
  return {"amplitude_scale", "k_f_veh_per_m2", "k_c_veh_per_m2", "k_veh_per_m2", "l0_m",
          "n_cells",         "dt_s",           "ramp_width_m",   "v_m_mps"};
}

void set_sweep_value(Scenario& s, const std::string& key, double value) {
  if (key == "amplitude_scale") {
    s.amplitude_scale = value;
  } else if (key == "k_f_veh_per_m2") {
    s.k_free = value;
  } else if (key == "k_c_veh_per_m2") {
    s.k_congested = value;
  } else if (key == "k_veh_per_m2") {
    s.k_free = value;
    s.k_congested = value;
  } else if (key == "l0_m") {
    s.shock0 = value;
  } else if (key == "n_cells") {
    if (value < 3.0 || value != std::floor(value)) {
      throw ConfigError("n_cells must be an integer >= 3");
    }
    s.n_cells = static_cast<std::size_t>(value);
  } else if (key == "dt_s") {
    s.dt = value;
  } else if (key == "ramp_width_m") {
    s.ramp_width = value;
  } else if (key == "v_m_mps") {
    s.v_max = value;
  } else {
    throw ConfigError("'" + key + "' is not sweepable");
  }
}

} // namespace shockctl
