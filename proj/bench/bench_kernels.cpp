// Serial reference vs OpenMP kernels: one ALE Godunov step, a nodal map, the
// forward transform and a full nonlinear plant step.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "shockctl/backstepping.hpp"
#include "shockctl/kernels.hpp"
#include "shockctl/plant.hpp"

using namespace shockctl;

namespace {

std::vector<double> profile(std::size_t n) {
  std::vector<double> rho(n);
  for (std::size_t i = 0; i < n; ++i) {
    rho[i] = 0.04 + 0.01 * std::sin(0.01 * static_cast<double>(i));
  }
  return rho;
}

template <kernels::Exec E>
void godunov_step(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const std::vector<double> rho = profile(n);
  std::vector<double> out(n), scratch(n - 1);
  const kernels::MovingFlux f{40.0, 0.16};
  const kernels::SideGeometry g{0.1, 0.1001, 0.0, -0.5, kernels::End::pinned,
                                kernels::End::interface};
  for (auto _ : st) {
    kernels::ale_godunov_step(E, rho, out, scratch, f, g, 1e-3);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(n));
}

template <kernels::Exec E>
void nodal_map(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const std::vector<double> rho = profile(n);
  std::vector<double> out(n);
  for (auto _ : st) {
    kernels::nodal_map(E, std::span<double>(out), [&](std::size_t i) {
      return std::exp(-rho[i]) * std::cos(rho[i]);
    });
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(n));
}

struct Fixture {
  FundamentalDiagram fd{40.0, 0.16};
  Setpoint sp = matched_setpoint(0.032, 200.0, 500.0, fd);
  DerivedParams params = derived_params(sp, fd);
  ControlGains gains = make_gains(2e-4, 2e-4, params);
};

template <kernels::Exec E>
void transform(benchmark::State& st) {
  const Fixture fx;
  const PlantState s =
      initial_state(InitialProfile{330.0, 0.016, 0.016, 20.0}, fx.sp, static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    TargetState t = forward_transform(s, fx.sp, fx.gains, fx.params, E);
    benchmark::DoNotOptimize(t.w_free.values().data());
  }
}

template <kernels::Exec E>
void plant_step(benchmark::State& st) {
  const Fixture fx;
  const PlantState s =
      initial_state(InitialProfile{330.0, 0.016, 0.016, 20.0}, fx.sp, static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    StepOutcome o = step_nonlinear(s, s.free.front(), s.congested.back(), 1e-3, fx.fd, 0.9, E);
    benchmark::DoNotOptimize(o.state.shock);
  }
}

constexpr auto kSerial = kernels::Exec::serial;
constexpr auto kParallel = kernels::Exec::parallel;

} // namespace

BENCHMARK(godunov_step<kSerial>)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(godunov_step<kParallel>)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(nodal_map<kSerial>)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(nodal_map<kParallel>)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);
BENCHMARK(transform<kSerial>)->Arg(200)->Arg(4096)->Arg(32768);
BENCHMARK(transform<kParallel>)->Arg(200)->Arg(4096)->Arg(32768);
BENCHMARK(plant_step<kSerial>)->Arg(200)->Arg(4096)->Arg(32768);
BENCHMARK(plant_step<kParallel>)->Arg(200)->Arg(4096)->Arg(32768);

BENCHMARK_MAIN();
