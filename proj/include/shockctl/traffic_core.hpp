#pragma once

// Greenshields fundamental diagram, setpoints and the linearization constants.
// All quantities are SI: metres, seconds, vehicles per metre.

namespace shockctl {

inline constexpr double kPerKm = 1.0e-3;   // veh/km -> veh/m
inline constexpr double kKmPerHour = 1.0 / 3.6;

class FundamentalDiagram {
public:
  FundamentalDiagram(double v_max, double rho_max);

  double v_max() const { return v_max_; }
  double rho_max() const { return rho_max_; }
  /// Vertex of the quadratic flux; separates free and congested traffic.
  double jump_density() const { return 0.5 * rho_max_; }

private:
  double v_max_;
  double rho_max_;
};

/// V(rho) = v_max (1 - rho / rho_max). Throws DomainError outside [0, rho_max].
double equilibrium_velocity(double rho, const FundamentalDiagram& fd);
/// Q(rho) = rho V(rho).
double flux(double rho, const FundamentalDiagram& fd);
/// Q'(rho) = v_max (1 - 2 rho / rho_max).
double characteristic_speed(double rho, const FundamentalDiagram& fd);

struct Setpoint {
  double rho_free;       // upstream (free) equilibrium density
  double rho_congested;  // downstream (congested) equilibrium density
  double shock_position; // l*
  double length;         // L
};

/// Checks 0 < rho_f < rho_jump < rho_c < rho_max, 0 < l* < L and flux matching.
void validate(const Setpoint& sp, const FundamentalDiagram& fd);

/// Builds the flux-matched setpoint rho_c* = rho_max - rho_f*.
Setpoint matched_setpoint(double rho_free, double shock_position, double length,
                          const FundamentalDiagram& fd);

/// Linearization constants around a setpoint.
struct DerivedParams {
  double transport_speed; // u = Q'(rho_f*) = -Q'(rho_c*)
  double coupling;        // b = v_max / rho_max
};

DerivedParams derived_params(const Setpoint& sp, const FundamentalDiagram& fd);

} // namespace shockctl
