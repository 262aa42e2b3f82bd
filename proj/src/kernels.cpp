#include "shockctl/kernels.hpp"

#include <algorithm>

namespace shockctl::kernels {

double MovingFlux::godunov(double left, double right, double s) const {
  // Concave flux: min(demand(left), supply(right)) around the maximiser.
  const double crit = 0.5 * rho_max * (1.0 - s / v_max);
  const double demand = (*this)(std::min(left, crit), s);
  const double supply = (*this)(std::max(right, crit), s);
  return std::min(demand, supply);
}

namespace {

// Face j+1/2 sits at fraction (j + 1/2) / n of the subdomain; its speed
// interpolates the end speeds.
inline double face_speed(const SideGeometry& g, std::size_t j, std::size_t n) {
  const double frac = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
  return g.s_left + frac * (g.s_right - g.s_left);
}

inline double face_flux(std::span<const double> rho, const MovingFlux& f,
                        const SideGeometry& g, std::size_t j, std::size_t n) {
  return f.godunov(rho[j], rho[j + 1], face_speed(g, j, n));
}

inline double update_node(std::span<const double> rho, std::span<const double> flux,
                          const MovingFlux& f, const SideGeometry& g, double dt,
                          std::size_t i, std::size_t n) {
  if (i == 0) {
    if (g.left == End::pinned) {
      return rho[0];
    }
    const double in = f(rho[0], g.s_left);
    const double mass = 0.5 * g.h_old * rho[0] - dt * (flux[0] - in);
    return mass / (0.5 * g.h_new);
  }
  if (i == n) {
    if (g.right == End::pinned) {
      return rho[n];
    }
    const double out = f(rho[n], g.s_right);
    const double mass = 0.5 * g.h_old * rho[n] - dt * (out - flux[n - 1]);
    return mass / (0.5 * g.h_new);
  }
  const double mass = g.h_old * rho[i] - dt * (flux[i] - flux[i - 1]);
  return mass / g.h_new;
}

} // namespace

namespace serial {

void ale_godunov_step(std::span<const double> rho, std::span<double> rho_new,
                      std::span<double> flux_scratch, const MovingFlux& f,
                      const SideGeometry& g, double dt) {
  const std::size_t n = rho.size() - 1;
  for (std::size_t j = 0; j < n; ++j) {
    flux_scratch[j] = face_flux(rho, f, g, j, n);
  }
  for (std::size_t i = 0; i <= n; ++i) {
    rho_new[i] = update_node(rho, flux_scratch, f, g, dt, i, n);
  }
}

} // namespace serial

namespace omp {

void ale_godunov_step(std::span<const double> rho, std::span<double> rho_new,
                      std::span<double> flux_scratch, const MovingFlux& f,
                      const SideGeometry& g, double dt) {
  const auto n = static_cast<long>(rho.size() - 1);
  const auto un = static_cast<std::size_t>(n);
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (long j = 0; j < n; ++j) {
      flux_scratch[static_cast<std::size_t>(j)] =
          face_flux(rho, f, g, static_cast<std::size_t>(j), un);
    }
#pragma omp for schedule(static)
    for (long i = 0; i <= n; ++i) {
      rho_new[static_cast<std::size_t>(i)] =
          update_node(rho, flux_scratch, f, g, dt, static_cast<std::size_t>(i), un);
    }
  }
}

} // namespace omp

void ale_godunov_step(Exec exec, std::span<const double> rho, std::span<double> rho_new,
                      std::span<double> flux_scratch, const MovingFlux& f,
                      const SideGeometry& g, double dt) {
  if (exec == Exec::parallel && rho.size() >= kParallelThreshold) {
    omp::ale_godunov_step(rho, rho_new, flux_scratch, f, g, dt);
  } else {
    serial::ale_godunov_step(rho, rho_new, flux_scratch, f, g, dt);
  }
}

} // namespace shockctl::kernels
