#include "shockctl/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shockctl/errors.hpp"

namespace shockctl {

namespace {

// Coordinates computed as 2l - x or l + s can overshoot an endpoint by a few ulps.
constexpr double kRelativeSlack = 1e-9;

} // namespace

CellLocation locate(Interval domain, std::size_t n_cells, double x) {
  const double len = domain.length();
  const double slack = kRelativeSlack * std::max(1.0, std::abs(len));
  if (x < domain.left - slack || x > domain.right + slack || std::isnan(x)) {
    throw DomainError("position " + std::to_string(x) + " outside [" +
                      std::to_string(domain.left) + ", " + std::to_string(domain.right) + "]");
  }
  const double h = len / static_cast<double>(n_cells);
  const double s = std::clamp((x - domain.left) / h, 0.0, static_cast<double>(n_cells));
  auto cell = static_cast<std::size_t>(s);
  if (cell >= n_cells) {
    cell = n_cells - 1;
  }
  return {cell, s - static_cast<double>(cell)};
}

NodalField::NodalField(Interval domain, std::vector<double> values)
    : domain_(domain), values_(std::move(values)) {
  if (!(domain_.left < domain_.right)) {
    throw DomainError("field domain must satisfy left < right");
  }
  if (values_.size() < 3) {
    throw DomainError("field needs at least two cells");
  }
}

NodalField NodalField::constant(Interval domain, std::size_t n_cells, double value) {
  return NodalField(domain, std::vector<double>(n_cells + 1, value));
}

double NodalField::node(std::size_t i) const {
  if (i == n_cells()) {
    return domain_.right;
  }
  return domain_.left + static_cast<double>(i) * spacing();
}

double NodalField::at(double x) const {
  const auto [cell, theta] = locate(domain_, n_cells(), x);
  return values_[cell] + theta * (values_[cell + 1] - values_[cell]);
}

double NodalField::integral(double a, double b) const {
  return FieldPrimitive(*this).integral(a, b);
}

NodalField NodalField::minus(double offset) const {
  NodalField out = *this;
  for (double& v : out.values_) {
    v -= offset;
  }
  return out;
}

FieldPrimitive::FieldPrimitive(const NodalField& field)
    : field_(&field), cumulative_(field.n_nodes(), 0.0) {
  const double h = field.spacing();
  const auto v = field.values();
  for (std::size_t i = 1; i < v.size(); ++i) {
    cumulative_[i] = cumulative_[i - 1] + 0.5 * h * (v[i - 1] + v[i]);
  }
}

double FieldPrimitive::operator()(double x) const {
  const auto [cell, theta] = locate(field_->domain(), field_->n_cells(), x);
  const auto v = field_->values();
  const double h = field_->spacing();
  const double partial = h * theta * (v[cell] + 0.5 * theta * (v[cell + 1] - v[cell]));
  return cumulative_[cell] + partial;
}

namespace {

// Weights of x -> integral of the interpolant from domain.left to x.
void add_primitive_weights(Interval domain, std::size_t n_cells, double x, double scale,
                           std::span<double> weights) {
  const auto [cell, theta] = locate(domain, n_cells, x);
  const double h = domain.length() / static_cast<double>(n_cells);
  for (std::size_t i = 0; i < cell; ++i) {
    weights[i] += 0.5 * h * scale;
    weights[i + 1] += 0.5 * h * scale;
  }
  weights[cell] += scale * h * (theta - 0.5 * theta * theta);
  weights[cell + 1] += scale * h * 0.5 * theta * theta;
}

} // namespace

void add_integral_weights(Interval domain, std::size_t n_cells, double a, double b,
                          double scale, std::span<double> weights) {
  add_primitive_weights(domain, n_cells, b, scale, weights);
  add_primitive_weights(domain, n_cells, a, -scale, weights);
}

std::vector<double> nodal_derivative(const NodalField& field) {
  const auto v = field.values();
  const std::size_t n = field.n_cells();
  const double h = field.spacing();
  std::vector<double> d(n + 1);
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  d[n] = (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * h);
  for (std::size_t i = 1; i < n; ++i) {
    d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
  }
  return d;
}

} // namespace shockctl
