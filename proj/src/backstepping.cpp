#include "shockctl/backstepping.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "shockctl/errors.hpp"

namespace shockctl {

TargetState forward_transform(const PlantState& state, const Setpoint& sp,
                              const ControlGains& gains, const DerivedParams& params,
                              kernels::Exec exec) {
  const GridDeviations dev(state, sp);
  const double x_dev = state.shock - sp.shock_position;
  TargetState t{state.free, state.congested, x_dev, state.time};
  kernels::nodal_map(exec, t.w_free.values(), [&](std::size_t i) {
    return target_free_at(dev, state.free.node(i), x_dev, gains, params);
  });
  kernels::nodal_map(exec, t.w_congested.values(), [&](std::size_t j) {
    return target_congested_at(dev, state.congested.node(j), x_dev, gains, params);
  });
  return t;
}

PlantDeviations inverse_transform(const TargetState& target, const Setpoint& sp,
                                  const ControlGains& gains, const DerivedParams& params) {
  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Interval fdom = target.w_free.domain();
  const Interval cdom = target.w_congested.domain();
  const std::size_t nf = target.w_free.n_cells();
  const std::size_t nc = target.w_congested.n_cells();
  const auto mf = static_cast<Eigen::Index>(nf + 1);
  const auto mc = static_cast<Eigen::Index>(nc + 1);
  const double l = fdom.right;
  const double L = cdom.right;
  if (std::abs(L - sp.length) > 1e-9 * sp.length) {
    throw DomainError("target state does not span the segment");
  }
  const double c = params.coupling / params.transport_speed;

  Matrix a = Matrix::Identity(mf + mc, mf + mc);
  Eigen::VectorXd rhs(mf + mc);
  for (std::size_t i = 0; i <= nf; ++i) {
    const double x = target.w_free.node(i);
    double* row = a.row(static_cast<Eigen::Index>(i)).data();
    const double k = gains.k_free * c;
    add_integral_weights(fdom, nf, x, l, k, {row, nf + 1});
    add_integral_weights(cdom, nc, l, std::min(L, 2.0 * l - x), k, {row + mf, nc + 1});
    rhs(static_cast<Eigen::Index>(i)) = target.w_free[i] + gains.k_free * target.x_dev;
  }
  for (std::size_t j = 0; j <= nc; ++j) {
    const double x = target.w_congested.node(j);
    const auto r = mf + static_cast<Eigen::Index>(j);
    double* row = a.row(r).data();
    const double k = gains.k_congested * c;
    add_integral_weights(cdom, nc, l, x, k, {row + mf, nc + 1});
    add_integral_weights(fdom, nf, std::max(0.0, 2.0 * l - x), l, k, {row, nf + 1});
    rhs(r) = target.w_congested[j] + gains.k_congested * target.x_dev;
  }

  const Eigen::VectorXd sol = a.partialPivLu().solve(rhs);
  if (!sol.allFinite()) {
    throw NumericalError("inverse transform: singular operator");
  }
  std::vector<double> vf(sol.data(), sol.data() + mf);
  std::vector<double> vc(sol.data() + mf, sol.data() + mf + mc);
  return {NodalField(fdom, std::move(vf)), NodalField(cdom, std::move(vc)), target.x_dev};
}

double g_term(const TargetState& target, const ControlGains& gains) {
  return (gains.k_free - gains.k_congested) * target.x_dev + target.w_free.back() -
         target.w_congested.front();
}

EpsilonPair epsilon_terms(const PlantState& state, double x, const Setpoint& sp) {
  const double l = state.shock;
  const double L = segment_length(state);
  const double mirror = 2.0 * l - x;
  EpsilonPair e{0.0, 0.0};
  if (x >= l && mirror >= 0.0) {
    e.eps_free = state.free.at(std::min(mirror, l)) - sp.rho_free;
  }
  if (x <= l && mirror <= L) {
    e.eps_congested = state.congested.at(std::max(mirror, l)) - sp.rho_congested;
  }
  return e;
}

ResidualReport target_residual(std::span<const TrajectorySample> trajectory,
                               const ControlGains& gains, const DerivedParams& params,
                               const Setpoint& sp, const ResidualOptions& options) {
  ResidualReport rep;
  if (trajectory.size() < 3) {
    throw DomainError("target_residual needs at least three samples");
  }
  const double u = params.transport_speed;
  const double b = params.coupling;
  std::vector<TargetState> w;
  w.reserve(trajectory.size());
  for (const auto& s : trajectory) {
    w.push_back(forward_transform(s.state, sp, gains, params));
  }

  for (std::size_t k = 1; k + 1 < trajectory.size(); ++k) {
    const PlantState& st = trajectory[k].state;
    if (st.time < options.t_begin) {
      continue;
    }
    const PlantState& prev = trajectory[k - 1].state;
    const PlantState& next = trajectory[k + 1].state;
    const double dt2 = next.time - prev.time;
    const double l = st.shock;
    const double L = segment_length(st);
    const double ldot = (next.shock - prev.shock) / dt2;
    const double g = g_term(w[k], gains);
    const double u_in = st.free.front() - sp.rho_free;
    const double u_out = st.congested.back() - sp.rho_congested;
    ++rep.samples;

    rep.boundary_free = std::max(rep.boundary_free, std::abs(w[k].w_free.front()));
    rep.boundary_congested =
        std::max(rep.boundary_congested, std::abs(w[k].w_congested.back()));
    const double xdot = (w[k + 1].x_dev - w[k - 1].x_dev) / dt2;
    const double r_ode =
        std::abs(xdot + gains.a * w[k].x_dev + b * (w[k].w_free.back() + w[k].w_congested.front()));
    rep.ode = std::max(rep.ode, r_ode);
    rep.ode_l1 += 0.5 * dt2 * r_ode;

    {
      const NodalField& wf = w[k].w_free;
      const std::vector<double> dx = nodal_derivative(wf);
      const double band = options.kink_cells * wf.spacing();
      const double reach = std::min(prev.shock, next.shock);
      double l1 = 0.0;
      for (std::size_t i = 1; i < wf.n_cells(); ++i) {
        const double x = wf.node(i);
        if (x > reach || std::abs(x - (2.0 * l - L)) <= band || std::abs(x - l) <= band) {
          continue;
        }
        const double dtw = (w[k + 1].w_free.at(x) - w[k - 1].w_free.at(x)) / dt2;
        const double eps_c = epsilon_terms(st, x, sp).eps_congested;
        double src = gains.k_free * b / u * ldot * (g + 2.0 * eps_c);
        if (2.0 * l - x > L) {
          src += gains.k_free * b * u_out;
        }
        const double r = std::abs(dtw + u * dx[i] - src);
        rep.pde_free = std::max(rep.pde_free, r);
        l1 += r * wf.spacing();
      }
      rep.pde_free_l1 = std::max(rep.pde_free_l1, l1);
    }
    {
      const NodalField& wc = w[k].w_congested;
      const std::vector<double> dx = nodal_derivative(wc);
      const double band = options.kink_cells * wc.spacing();
      const double reach = std::max(prev.shock, next.shock);
      double l1 = 0.0;
      for (std::size_t j = 1; j < wc.n_cells(); ++j) {
        const double x = wc.node(j);
        if (x < reach || std::abs(x - 2.0 * l) <= band || std::abs(x - l) <= band) {
          continue;
        }
        const double dtw = (w[k + 1].w_congested.at(x) - w[k - 1].w_congested.at(x)) / dt2;
        const double eps_f = epsilon_terms(st, x, sp).eps_free;
        double src = gains.k_congested * b / u * ldot * (g - 2.0 * eps_f);
        if (2.0 * l - x < 0.0) {
          src += gains.k_congested * b * u_in;
        }
        const double r = std::abs(dtw - u * dx[j] - src);
        rep.pde_congested = std::max(rep.pde_congested, r);
        l1 += r * wc.spacing();
      }
      rep.pde_congested_l1 = std::max(rep.pde_congested_l1, l1);
    }
  }
  return rep;
}

} // namespace shockctl
