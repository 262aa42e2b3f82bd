#include "shockctl/deviation_source.hpp"

namespace shockctl {

namespace {

NodalField with_front(NodalField f, std::optional<double> v) {
  if (v) {
    f[0] = *v;
  }
  return f;
}

NodalField with_back(NodalField f, std::optional<double> v) {
  if (v) {
    f[f.n_cells()] = *v;
  }
  return f;
}

} // namespace

GridDeviations::GridDeviations(const PlantState& state, const Setpoint& sp,
                               std::optional<BoundaryOverride> boundary)
    : shock_(state.shock),
      length_(segment_length(state)),
      free_(with_front(state.free.minus(sp.rho_free),
                       boundary ? std::optional<double>(boundary->inflow) : std::nullopt)),
      congested_(with_back(state.congested.minus(sp.rho_congested),
                           boundary ? std::optional<double>(boundary->outflow) : std::nullopt)),
      free_prim_(free_),
      cong_prim_(congested_) {}

CharacteristicDeviations::CharacteristicDeviations(const InputHistory& in,
                                                   const InputHistory& out, double time,
                                                   double shock, double length,
                                                   double transport_speed,
                                                   std::optional<BoundaryOverride> pending)
    : in_(&in),
      out_(&out),
      time_(time),
      shock_(shock),
      length_(length),
      u_(transport_speed),
      pending_(pending) {}

double CharacteristicDeviations::free_at(double x) const {
  const double s = time_ - x / u_;
  return pending_ ? in_->at(s, {time_, pending_->inflow}) : in_->at(s);
}

double CharacteristicDeviations::congested_at(double x) const {
  const double s = time_ - (length_ - x) / u_;
  return pending_ ? out_->at(s, {time_, pending_->outflow}) : out_->at(s);
}

double CharacteristicDeviations::free_integral(double a, double b) const {
  // xi = u (t - s): the upper spatial bound maps to the older time.
  const double s0 = time_ - b / u_;
  const double s1 = time_ - a / u_;
  if (s0 > s1) {
    return -free_integral(b, a);
  }
  return u_ * (pending_ ? in_->integral(s0, s1, {time_, pending_->inflow})
                        : in_->integral(s0, s1));
}

double CharacteristicDeviations::congested_integral(double a, double b) const {
  const double s0 = time_ - (length_ - a) / u_;
  const double s1 = time_ - (length_ - b) / u_;
  if (s0 > s1) {
    return -congested_integral(b, a);
  }
  return u_ * (pending_ ? out_->integral(s0, s1, {time_, pending_->outflow})
                        : out_->integral(s0, s1));
}

} // namespace shockctl
