#pragma once

// Data-parallel inner loops of the solver. Every kernel has a serial reference
// and an OpenMP version with identical per-element arithmetic, so the two agree
// bit for bit regardless of thread count (no reductions cross threads).

#include <cstddef>
#include <span>

namespace shockctl::kernels {

enum class Exec { serial, parallel };

/// Below this many nodes the parallel dispatch falls back to the serial loop.
inline constexpr std::size_t kParallelThreshold = 2048;

/// Greenshields flux seen from a face moving at speed s: f(rho) = Q(rho) - s rho.
struct MovingFlux {
  double v_max;
  double rho_max;

  double operator()(double rho, double s) const {
    return rho * (v_max * (1.0 - rho / rho_max) - s);
  }
  /// Exact Godunov flux for the concave f across (left, right).
  double godunov(double left, double right, double s) const;
};

enum class End {
  pinned,    // Dirichlet node: value imposed from outside, not updated
  interface, // half cell bounded by the shock; flux f_s(rho_end) leaves through it
};

struct SideGeometry {
  double h_old;   // node spacing before the step
  double h_new;   // node spacing after the step
  double s_left;  // velocity of the left end of the subdomain
  double s_right; // velocity of the right end
  End left;
  End right;
};

/// One conservative arbitrary-Lagrangian-Eulerian Godunov step on a subdomain whose
/// nodes move affinely with its ends. Node i owns the dual cell around it (half
/// cells at the ends). `flux_scratch` needs rho.size() - 1 entries.
namespace serial {
void ale_godunov_step(std::span<const double> rho, std::span<double> rho_new,
                      std::span<double> flux_scratch, const MovingFlux& f,
                      const SideGeometry& g, double dt);
}
namespace omp {
void ale_godunov_step(std::span<const double> rho, std::span<double> rho_new,
                      std::span<double> flux_scratch, const MovingFlux& f,
                      const SideGeometry& g, double dt);
}

void ale_godunov_step(Exec exec, std::span<const double> rho, std::span<double> rho_new,
                      std::span<double> flux_scratch, const MovingFlux& f,
                      const SideGeometry& g, double dt);

/// out[i] = fn(i) for every i.
template <class Fn>
void nodal_map(Exec exec, std::span<double> out, Fn&& fn) {
  const auto n = static_cast<long>(out.size());
  if (exec == Exec::parallel && out.size() >= kParallelThreshold) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    }
  } else {
    for (long i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    }
  }
}

} // namespace shockctl::kernels
