#pragma once

#include <span>
#include <string>
#include <vector>

#include "shockctl/backstepping.hpp"
#include "shockctl/control.hpp"
#include "shockctl/field.hpp"
#include "shockctl/plant.hpp"

namespace shockctl {

/// Weight lambda on the derivative terms; must exceed 4b/(a u).
class LyapunovWeights {
public:
  LyapunovWeights(double lambda, const ControlGains& gains, const DerivedParams& params);
  /// lambda = 8b/(a u).
  static LyapunovWeights standard(const ControlGains& gains, const DerivedParams& params);
  static double lower_bound(const ControlGains& gains, const DerivedParams& params);

  double lambda() const { return lambda_; }

private:
  double lambda_;
};

struct LyapunovValue {
  double v = 0.0;
  double v1 = 0.0; // int_0^l e^{-x} w_f^2
  double v2 = 0.0; // int_l^L e^{x-L} w_c^2
  double v3 = 0.0; // int_0^l e^{-x} (w_f,x)^2
  double v4 = 0.0; // int_l^L e^{x-L} (w_c,x)^2
  double v5 = 0.0; // X^2
};

LyapunovValue lyapunov(const TargetState& target, const LyapunovWeights& weights);

/// (int f^2 + f_x^2)^{1/2} over the field's domain; f_x from nodal differences.
double h1_norm(const NodalField& field);

/// ||rho_f - rho_f*||_H1 + ||rho_c - rho_c*||_H1 + (l - l*)^2.
double z_metric(const PlantState& state, const Setpoint& sp);

struct DecayFit {
  double sigma0;
  double r_squared;
};

/// Least-squares fit of ln V = c - sigma0 t over samples with t in [t0, t1].
DecayFit decay_rate_fit(std::span<const double> t, std::span<const double> v, double t0,
                        double t1);

struct MetricsRecord {
  double t = 0.0;
  LyapunovValue lyap;
  double h1_free = 0.0;
  double h1_congested = 0.0;
  double z = 0.0;
  double shock = 0.0;
  double x_dev = 0.0;
  double u_in = 0.0;
  double u_out = 0.0;
  std::string events;
};

using MetricsTrace = std::vector<MetricsRecord>;

MetricsRecord record_metrics(const PlantState& state, const TargetState& target,
                             const ControlInput& applied, const Setpoint& sp,
                             const LyapunovWeights& weights, std::string events = {});

/// V recomputed from the stored components matches the stored V bit for bit.
bool definition_audit(const MetricsRecord& r, const LyapunovWeights& weights);

/// min{(L - l*)^2, (l*)^2}.
double validity_radius_sq(const Setpoint& sp);

/// X^2 < min{(L - l*)^2, (l*)^2} implies 0 < l < L.
bool validity_implication(const MetricsRecord& r, const Setpoint& sp);

DecayFit decay_rate_fit(const MetricsTrace& trace, double t0, double t1);

} // namespace shockctl
