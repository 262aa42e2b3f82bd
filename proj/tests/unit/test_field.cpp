#include <doctest.h>

#include <cmath>
#include <omp.h>
#include <random>
#include <vector>

#include "shockctl/errors.hpp"
#include "shockctl/field.hpp"
#include "shockctl/history.hpp"
#include "shockctl/kernels.hpp"

using namespace shockctl;

TEST_SUITE("field") {

TEST_CASE("nodes, interpolation and domain errors") {
  const NodalField f = NodalField::sample({0.0, 10.0}, 5, [](double x) { return 2.0 * x; });
  CHECK(f.n_nodes() == 6);
  CHECK(f.node(5) == 10.0);
  CHECK(f.at(3.0) == doctest::Approx(6.0));
  CHECK(f.at(10.0) == 20.0);
  CHECK_THROWS_AS(f.at(10.5), DomainError);
}

TEST_CASE("interpolant integrals are exact for linear data") {
  const NodalField f = NodalField::sample({1.0, 4.0}, 7, [](double x) { return 3.0 * x - 1.0; });
  auto exact = [](double a, double b) { return 1.5 * (b * b - a * a) - (b - a); };
  CHECK(f.integral(1.3, 3.7) == doctest::Approx(exact(1.3, 3.7)).epsilon(1e-14));
  CHECK(f.integral(3.7, 1.3) == doctest::Approx(-exact(1.3, 3.7)).epsilon(1e-14));
  const FieldPrimitive p(f);
  CHECK(p.integral(1.3, 3.7) == doctest::Approx(exact(1.3, 3.7)).epsilon(1e-14));
}

TEST_CASE("integral weights reproduce the interpolant integral") {
  const Interval dom{0.0, 2.0};
  const NodalField f = NodalField::sample(dom, 8, [](double x) { return std::sin(3.0 * x); });
  std::vector<double> w(9, 0.0);
  add_integral_weights(dom, 8, 0.3, 1.7, 1.0, w);
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    s += w[i] * f[i];
  }
  CHECK(s == doctest::Approx(f.integral(0.3, 1.7)).epsilon(1e-14));
}

TEST_CASE("nodal derivative is exact on quadratics") {
  const NodalField f = NodalField::sample({0.0, 1.0}, 10, [](double x) { return x * x; });
  const auto d = nodal_derivative(f);
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(d[i] == doctest::Approx(2.0 * f.node(i)).epsilon(1e-12));
  }
}

}

TEST_SUITE("history") {

TEST_CASE("interpolation, hold and integral") {
  InputHistory h(10.0);
  h.push(0.0, 0.0);
  h.push(1.0, 2.0);
  h.push(2.0, 2.0);
  CHECK(h.at(0.5) == doctest::Approx(1.0));
  CHECK(h.at(5.0) == 2.0); // hold newest
  CHECK(h.integral(0.0, 2.0) == doctest::Approx(3.0));
  CHECK(h.at(2.5, {3.0, 4.0}) == doctest::Approx(3.0));
  CHECK_THROWS_AS(h.at(-1.0), ConfigError);
  CHECK_THROWS(h.push(2.0, 1.0));
}

TEST_CASE("old samples are discarded beyond the horizon") {
  InputHistory h(1.0);
  for (int k = 0; k <= 100; ++k) {
    h.push(0.1 * k, k);
  }
  CHECK(h.oldest().t <= 9.0 + 1e-12);
  CHECK(h.oldest().t >= 8.8);
  CHECK_THROWS_AS(h.at(5.0), ConfigError);
}

}

TEST_SUITE("kernels") {

TEST_CASE("Godunov flux is the exact Riemann flux of the concave flux") {
  const kernels::MovingFlux f{40.0, 0.16};
  // Shock with negative speed: right state flux.
  CHECK(f.godunov(0.03, 0.13, 0.0) == doctest::Approx(f(0.13, 0.0)));
  // Transonic rarefaction: vertex flux.
  CHECK(f.godunov(0.12, 0.02, 0.0) == doctest::Approx(f(0.08, 0.0)));
  // Free-flow rarefaction: left state.
  CHECK(f.godunov(0.03, 0.02, 0.0) == doctest::Approx(f(0.03, 0.0)));
}

TEST_CASE("serial and OpenMP kernels agree bit for bit") {
  omp_set_num_threads(4);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> r(0.01, 0.07);
  const std::size_t n = 5001;
  std::vector<double> rho(n);
  for (auto& v : rho) {
    v = r(rng);
  }
  const kernels::MovingFlux f{40.0, 0.16};
  const kernels::SideGeometry g{0.1, 0.1001, 0.0, -0.5, kernels::End::pinned,
                                kernels::End::interface};
  std::vector<double> a(n), b(n), sa(n - 1), sb(n - 1);
  kernels::serial::ale_godunov_step(rho, a, sa, f, g, 1e-3);
  kernels::omp::ale_godunov_step(rho, b, sb, f, g, 1e-3);
  CHECK(a == b);

  std::vector<double> m1(n), m2(n);
  auto fn = [&](std::size_t i) { return std::exp(-rho[i]) * std::sin(double(i)); };
  kernels::nodal_map(kernels::Exec::serial, std::span<double>(m1), fn);
  kernels::nodal_map(kernels::Exec::parallel, std::span<double>(m2), fn);
  CHECK(m1 == m2);
}

TEST_CASE("static uniform grid with pinned ends is a fixed point") {
  const std::size_t n = 64;
  std::vector<double> rho(n, 0.05), out(n), s(n - 1);
  const kernels::MovingFlux f{40.0, 0.16};
  const kernels::SideGeometry g{1.0, 1.0, 0.0, 0.0, kernels::End::pinned, kernels::End::pinned};
  kernels::serial::ale_godunov_step(rho, out, s, f, g, 0.01);
  for (double v : out) {
    CHECK(v == doctest::Approx(0.05).epsilon(1e-15));
  }
}

}
