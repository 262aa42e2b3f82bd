#pragma once

// Read access to the deviation fields rho~_f on [0, l] and rho~_c on [l, L] for the
// control law and the backstepping transform. Two sources exist:
//   GridDeviations            piecewise-linear interpolant of the plant samples
//   CharacteristicDeviations  exact transport solution built from the input
//                             histories (linearized plant only)

#include <concepts>
#include <optional>

#include "shockctl/field.hpp"
#include "shockctl/history.hpp"
#include "shockctl/plant.hpp"
#include "shockctl/traffic_core.hpp"

namespace shockctl {

template <class S>
concept DeviationSource = requires(const S& s, double x, double a, double b) {
  { s.shock() } -> std::convertible_to<double>;
  { s.length() } -> std::convertible_to<double>;
  { s.free_at(x) } -> std::convertible_to<double>;
  { s.congested_at(x) } -> std::convertible_to<double>;
  { s.free_integral(a, b) } -> std::convertible_to<double>;
  { s.congested_integral(a, b) } -> std::convertible_to<double>;
};

/// Boundary values that replace the x = 0 and x = L samples.
struct BoundaryOverride {
  double inflow;
  double outflow;
};

class GridDeviations {
public:
  GridDeviations(const PlantState& state, const Setpoint& sp,
                 std::optional<BoundaryOverride> boundary = std::nullopt);
  // The primitives point into the member fields.
  GridDeviations(const GridDeviations&) = delete;
  GridDeviations& operator=(const GridDeviations&) = delete;

  double shock() const { return shock_; }
  double length() const { return length_; }
  double free_at(double x) const { return free_.at(x); }
  double congested_at(double x) const { return congested_.at(x); }
  double free_integral(double a, double b) const { return free_prim_.integral(a, b); }
  double congested_integral(double a, double b) const { return cong_prim_.integral(a, b); }

  const NodalField& free() const { return free_; }
  const NodalField& congested() const { return congested_; }

private:
  double shock_;
  double length_;
  NodalField free_;
  NodalField congested_;
  FieldPrimitive free_prim_;
  FieldPrimitive cong_prim_;
};

/// rho~_f(x, t) = U_in(t - x/u), rho~_c(x, t) = U_out(t - (L - x)/u), with exact
/// integrals of the piecewise-linear histories. `pending` appends the inputs being
/// applied at time t before they are recorded.
class CharacteristicDeviations {
public:
  CharacteristicDeviations(const InputHistory& in, const InputHistory& out, double time,
                           double shock, double length, double transport_speed,
                           std::optional<BoundaryOverride> pending = std::nullopt);

  double shock() const { return shock_; }
  double length() const { return length_; }
  double free_at(double x) const;
  double congested_at(double x) const;
  double free_integral(double a, double b) const;
  double congested_integral(double a, double b) const;

private:
  const InputHistory* in_;
  const InputHistory* out_;
  double time_;
  double shock_;
  double length_;
  double u_;
  std::optional<BoundaryOverride> pending_;
};

static_assert(DeviationSource<GridDeviations>);
static_assert(DeviationSource<CharacteristicDeviations>);

} // namespace shockctl
