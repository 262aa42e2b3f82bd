#pragma once

#include <stdexcept>
#include <string>

namespace shockctl {

/// Density, position or other argument outside the admissible range.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Setpoint violates the free/congested ordering or the segment bounds.
class SetpointError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Bad scenario, unknown key, or a history lookup older than the stored horizon.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// CFL violation after the sub-step cap, or densities leaving [0, rho_max].
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace shockctl
