#include "shockctl/diagnostics.hpp"

#include <cmath>

#include "shockctl/errors.hpp"

namespace shockctl {

namespace {

// int_0^h s^k e^{-s} ds for k = 0, 1, 2.
struct ExpMoments {
  double i0, i1, i2;
};

ExpMoments exp_moments(double h) {
  if (h < 0.5) {
    // Alternating series; the closed forms cancel badly for small h.
    ExpMoments m{0.0, 0.0, 0.0};
    double term = 1.0; // (-1)^n h^n / n!
    for (int n = 0; n < 30; ++n) {
      m.i0 += term * h / (n + 1);
      m.i1 += term * h * h / (n + 2);
      m.i2 += term * h * h * h / (n + 3);
      term *= -h / (n + 1);
    }
    return m;
  }
  const double e = std::exp(-h);
  return {1.0 - e, 1.0 - e * (1.0 + h), 2.0 - e * (h * h + 2.0 * h + 2.0)};
}

// int over the domain of e^{-(x - left)} f^2 for the interpolant of `v` on a lattice
// of spacing h; reversed = true weights by e^{-(right - x)} instead.
double weighted_square(std::span<const double> v, double h, bool reversed) {
  const ExpMoments m = exp_moments(h);
  const std::size_t n = v.size() - 1;
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    // Segment in the local coordinate that grows away from the weight's peak.
    const double a = reversed ? v[n - k] : v[k];
    const double b = reversed ? v[n - k - 1] : v[k + 1];
    const double slope = (b - a) / h;
    const double decay = std::exp(-static_cast<double>(k) * h);
    sum += decay * (a * a * m.i0 + 2.0 * a * slope * m.i1 + slope * slope * m.i2);
  }
  return sum;
}

double square_integral(std::span<const double> v, double h) {
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    sum += v[k] * v[k] + v[k] * v[k + 1] + v[k + 1] * v[k + 1];
  }
  return sum * h / 3.0;
}

} // namespace

LyapunovWeights::LyapunovWeights(double lambda, const ControlGains& gains,
                                 const DerivedParams& params)
    : lambda_(lambda) {
  const double bound = lower_bound(gains, params);
  if (!(lambda > bound)) {
    throw ConfigError("lyapunov lambda = " + std::to_string(lambda) +
                      " must exceed 4b/(a u) = " + std::to_string(bound));
  }
}

LyapunovWeights LyapunovWeights::standard(const ControlGains& gains,
                                          const DerivedParams& params) {
  return {2.0 * lower_bound(gains, params), gains, params};
}

double LyapunovWeights::lower_bound(const ControlGains& gains, const DerivedParams& params) {
  return 4.0 * params.coupling / (gains.a * params.transport_speed);
}

LyapunovValue lyapunov(const TargetState& target, const LyapunovWeights& weights) {
  const NodalField& wf = target.w_free;
  const NodalField& wc = target.w_congested;
  const std::vector<double> df = nodal_derivative(wf);
  const std::vector<double> dc = nodal_derivative(wc);
  // e^{-x} on [0, l] starts at 1; e^{x-L} on [l, L] peaks at L.
  const double shift = std::exp(-wf.domain().left);
  LyapunovValue r;
  r.v1 = shift * weighted_square(wf.values(), wf.spacing(), false);
  r.v2 = weighted_square(wc.values(), wc.spacing(), true);
  r.v3 = shift * weighted_square(df, wf.spacing(), false);
  r.v4 = weighted_square(dc, wc.spacing(), true);
  r.v5 = target.x_dev * target.x_dev;
  r.v = r.v1 + r.v2 + weights.lambda() * r.v3 + weights.lambda() * r.v4 + r.v5;
  return r;
}

double h1_norm(const NodalField& field) {
  if (field.n_cells() < 3) {
    throw DomainError("h1_norm needs at least three cells");
  }
  const std::vector<double> d = nodal_derivative(field);
  return std::sqrt(square_integral(field.values(), field.spacing()) +
                   square_integral(d, field.spacing()));
}

double z_metric(const PlantState& state, const Setpoint& sp) {
  const double x = state.shock - sp.shock_position;
  return h1_norm(state.free.minus(sp.rho_free)) +
         h1_norm(state.congested.minus(sp.rho_congested)) + x * x;
}

DecayFit decay_rate_fit(std::span<const double> t, std::span<const double> v, double t0,
                        double t1) {
  if (t.size() != v.size()) {
    throw DomainError("decay_rate_fit: time and value series differ in length");
  }
  double n = 0.0, st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t0 || t[k] > t1) {
      continue;
    }
    if (!(v[k] > 0.0)) {
      throw DomainError("decay_rate_fit: nonpositive V at t = " + std::to_string(t[k]));
    }
    const double y = std::log(v[k]);
    n += 1.0;
    st += t[k];
    sy += y;
    stt += t[k] * t[k];
    sty += t[k] * y;
    syy += y * y;
  }
  if (n < 2.0) {
    throw DomainError("decay_rate_fit: fewer than two samples in window");
  }
  const double ctt = stt - st * st / n;
  const double cty = sty - st * sy / n;
  const double cyy = syy - sy * sy / n;
  if (!(ctt > 0.0)) {
    throw DomainError("decay_rate_fit: window has no time spread");
  }
  const double slope = cty / ctt;
  // A perfectly flat log series is fit exactly by a zero slope.
  const double r2 = cyy <= 1e-300 ? 1.0 : cty * cty / (ctt * cyy);
  return {-slope, r2};
}

DecayFit decay_rate_fit(const MetricsTrace& trace, double t0, double t1) {
  std::vector<double> t, v;
  t.reserve(trace.size());
  v.reserve(trace.size());
  for (const auto& r : trace) {
    t.push_back(r.t);
    v.push_back(r.lyap.v);
  }
  return decay_rate_fit(t, v, t0, t1);
}

MetricsRecord record_metrics(const PlantState& state, const TargetState& target,
                             const ControlInput& applied, const Setpoint& sp,
                             const LyapunovWeights& weights, std::string events) {
  MetricsRecord r;
  r.t = state.time;
  r.lyap = lyapunov(target, weights);
  r.h1_free = h1_norm(state.free.minus(sp.rho_free));
  r.h1_congested = h1_norm(state.congested.minus(sp.rho_congested));
  r.shock = state.shock;
  r.x_dev = state.shock - sp.shock_position;
  r.z = r.h1_free + r.h1_congested + r.x_dev * r.x_dev;
  r.u_in = applied.u_in;
  r.u_out = applied.u_out;
  r.events = std::move(events);
  return r;
}

bool definition_audit(const MetricsRecord& r, const LyapunovWeights& weights) {
  const LyapunovValue& c = r.lyap;
  return c.v == c.v1 + c.v2 + weights.lambda() * c.v3 + weights.lambda() * c.v4 + c.v5;
}

double validity_radius_sq(const Setpoint& sp) {
  const double up = sp.shock_position;
  const double down = sp.length - sp.shock_position;
  return std::min(up * up, down * down);
}

bool validity_implication(const MetricsRecord& r, const Setpoint& sp) {
  const bool small = r.x_dev * r.x_dev < validity_radius_sq(sp);
  return !small || (r.shock > 0.0 && r.shock < sp.length);
}

} // namespace shockctl
