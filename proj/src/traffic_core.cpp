#include "shockctl/traffic_core.hpp"

#include <cmath>
#include <string>

#include "shockctl/errors.hpp"

namespace shockctl {

namespace {

void check_density(double rho, const FundamentalDiagram& fd) {
  if (!(rho >= 0.0 && rho <= fd.rho_max())) {
    throw DomainError("density " + std::to_string(rho) + " veh/m outside [0, " +
                      std::to_string(fd.rho_max()) + "]");
  }
}

} // namespace

FundamentalDiagram::FundamentalDiagram(double v_max, double rho_max)
    : v_max_(v_max), rho_max_(rho_max) {
  if (!(v_max > 0.0) || !std::isfinite(v_max)) {
    throw DomainError("v_max must be positive");
  }
  if (!(rho_max > 0.0) || !std::isfinite(rho_max)) {
    throw DomainError("rho_max must be positive");
  }
}

double equilibrium_velocity(double rho, const FundamentalDiagram& fd) {
  check_density(rho, fd);
  return fd.v_max() * (1.0 - rho / fd.rho_max());
}

double flux(double rho, const FundamentalDiagram& fd) {
  return rho * equilibrium_velocity(rho, fd);
}

double characteristic_speed(double rho, const FundamentalDiagram& fd) {
  check_density(rho, fd);
  return fd.v_max() * (1.0 - 2.0 * rho / fd.rho_max());
}

void validate(const Setpoint& sp, const FundamentalDiagram& fd) {
  const double jump = fd.jump_density();
  if (!(sp.length > 0.0)) {
    throw SetpointError("segment length must be positive");
  }
  if (!(sp.rho_free > 0.0)) {
    throw SetpointError("violates 0 < rho_f*");
  }
  if (!(sp.rho_free < jump)) {
    throw SetpointError("violates rho_f* < rho_jump");
  }
  if (!(jump < sp.rho_congested)) {
    throw SetpointError("violates rho_jump < rho_c*");
  }
  if (!(sp.rho_congested < fd.rho_max())) {
    throw SetpointError("violates rho_c* < rho_max");
  }
  if (!(sp.shock_position > 0.0)) {
    throw SetpointError("violates 0 < l*");
  }
  if (!(sp.shock_position < sp.length)) {
    throw SetpointError("violates l* < L");
  }
  const double mismatch = std::abs(sp.rho_free + sp.rho_congested - fd.rho_max());
  if (mismatch > 1e-12 * fd.rho_max()) {
    throw SetpointError("violates rho_f* + rho_c* = rho_max (flux matching)");
  }
}

Setpoint matched_setpoint(double rho_free, double shock_position, double length,
                          const FundamentalDiagram& fd) {
  Setpoint sp{rho_free, fd.rho_max() - rho_free, shock_position, length};
  validate(sp, fd);
  return sp;
}

DerivedParams derived_params(const Setpoint& sp, const FundamentalDiagram& fd) {
  validate(sp, fd);
  return DerivedParams{fd.v_max() * (1.0 - 2.0 * sp.rho_free / fd.rho_max()),
                       fd.v_max() / fd.rho_max()};
}

} // namespace shockctl
